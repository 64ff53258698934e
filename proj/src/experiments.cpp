#include "bfix/experiments.hpp"

#include "bfix/bmetric.hpp"
#include "bfix/cauchy.hpp"
#include "bfix/comparison.hpp"
#include "bfix/json_io.hpp"
#include "bfix/multivalued.hpp"
#include "bfix/solvers.hpp"

#include "call_spec.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <variant>

namespace bfix {

namespace {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------------------------
// Parameter schema

enum class PType { Number, Integer, String, NumberList, IntegerList, StringList, PairList };

struct ParamSpec {
  std::string name;
  PType type;
  std::optional<Json> default_value;  ///< nullopt: required; null: optional without default
  std::string doc;
};

struct ExperimentDef {
  std::string name;
  std::string summary;
  std::vector<std::string> columns;
  std::vector<ParamSpec> params;
  ExperimentReport (*run)(const ExperimentConfig&);
};

const char* type_name(PType t) {
  switch (t) {
    case PType::Number: return "number";
    case PType::Integer: return "integer";
    case PType::String: return "string";
    case PType::NumberList: return "list of numbers";
    case PType::IntegerList: return "list of integers";
    case PType::StringList: return "list of strings";
    case PType::PairList: return "list of [x, y] pairs";
  }
  return "?";
}

// Numbers may be written as JSON numbers or as "p/q" strings.
std::optional<double> coerce_number(const Json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    try {
      return detail::parse_number(v.get<std::string>());
    } catch (const ConfigError&) {
      return std::nullopt;
    }
  }
  return std::nullopt;
}

std::optional<std::uint64_t> coerce_integer(const Json& v) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer()) {
    const auto i = v.get<std::int64_t>();
    if (i < 0) return std::nullopt;
    return static_cast<std::uint64_t>(i);
  }
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (d >= 0.0 && d <= 9.0e15 && std::floor(d) == d) return static_cast<std::uint64_t>(d);
  }
  return std::nullopt;
}

std::optional<Json> coerce(const Json& v, PType type) {
  switch (type) {
    case PType::Number:
      if (auto d = coerce_number(v)) return Json(*d);
      return std::nullopt;
    case PType::Integer:
      if (auto i = coerce_integer(v)) return Json(*i);
      return std::nullopt;
    case PType::String:
      if (v.is_string()) return v;
      return std::nullopt;
    case PType::NumberList:
    case PType::IntegerList:
    case PType::StringList: {
      if (!v.is_array()) return std::nullopt;
      const PType item = type == PType::NumberList    ? PType::Number
                         : type == PType::IntegerList ? PType::Integer
                                                      : PType::String;
      Json out = Json::array();
      for (const auto& e : v) {
        auto c = coerce(e, item);
        if (!c) return std::nullopt;
        out.push_back(*c);
      }
      return out;
    }
    case PType::PairList: {
      if (!v.is_array()) return std::nullopt;
      Json out = Json::array();
      for (const auto& e : v) {
        if (!e.is_array() || e.size() != 2) return std::nullopt;
        auto x = coerce_number(e[0]), y = coerce_number(e[1]);
        if (!x || !y) return std::nullopt;
        out.push_back(Json::array({*x, *y}));
      }
      return out;
    }
  }
  return std::nullopt;
}

const std::vector<ExperimentDef>& registry();

const ExperimentDef* find_experiment(const std::string& name) {
  for (const auto& def : registry())
    if (def.name == name) return &def;
  return nullptr;
}

// ---------------------------------------------------------------------------------------------
// Helpers shared by the runners

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double num(const Json& p, const char* key) { return p.at(key).get<double>(); }
std::size_t count(const Json& p, const char* key) { return p.at(key).get<std::size_t>(); }
std::string str(const Json& p, const char* key) { return p.at(key).get<std::string>(); }

std::string cell(double x) { return format_real(x); }
std::string cell(std::size_t x) { return std::to_string(x); }

using AnySpace = std::variant<BMetricSpace<double>, BMetricSpace<Vector>, BMetricSpace<Label>>;

AnySpace make_space(const std::string& spec) {
  const auto call = detail::parse_call(spec);
  if (call.name == "snowflake") return snowflake(detail::numeric_args(call, 1)[0]);
  if (call.name == "real_line") {
    detail::numeric_args(call, 0);
    return real_line();
  }
  if (call.name == "lp") {
    const auto args = detail::numeric_args(call, 2);
    if (args[1] < 1.0 || std::floor(args[1]) != args[1]) throw ConfigError("lp dimension must be a positive integer");
    return lp_quasinorm(args[0], static_cast<int>(args[1]));
  }
  if (call.name == "discrete") {
    const auto args = detail::numeric_args(call, 1);
    if (args[0] < 1.0 || std::floor(args[0]) != args[0]) throw ConfigError("discrete size must be a positive integer");
    return discrete_metric(static_cast<std::size_t>(args[0]));
  }
  if (call.name == "matrix") {
    if (call.args.size() != 1) throw ConfigError("matrix(path) takes one argument");
    return load_discrete_matrix_csv(call.args[0]);
  }
  throw ConfigError("unknown space '" + spec + "'");
}

BMetricSpace<double> make_scalar_space(const std::string& spec) {
  auto space = make_space(spec);
  if (auto* s = std::get_if<BMetricSpace<double>>(&space)) return *s;
  throw ConfigError("space '" + spec + "' is not a real-line space; solvers need snowflake(q) or real_line");
}

SelfMap<double> make_self_map(const std::string& spec) {
  const auto call = detail::parse_call(spec);
  if (call.name == "scale") {
    const double c = detail::numeric_args(call, 1)[0];
    return {[c](double x) { return c * x; }, spec};
  }
  if (call.name == "shift") {
    const double t = detail::numeric_args(call, 1)[0];
    return {[t](double x) { return x + t; }, spec};
  }
  if (call.name == "affine") {
    const auto args = detail::numeric_args(call, 2);
    const double c = args[0], t = args[1];
    return {[c, t](double x) { return c * x + t; }, spec};
  }
  if (call.name == "identity") {
    detail::numeric_args(call, 0);
    return {[](double x) { return x; }, spec};
  }
  throw ConfigError("unknown map '" + spec + "'");
}

MultiMap<double> make_multimap(const std::string& spec) {
  const auto call = detail::parse_call(spec);
  if (call.name == "scales" || call.name == "shifts") {
    const auto args = detail::numeric_args(call, static_cast<std::size_t>(-1));
    if (args.empty()) throw ConfigError("'" + call.name + "' needs at least one argument");
    if (call.name == "scales")
      return {[args](double x) {
                std::vector<double> out;
                for (double c : args) out.push_back(c * x);
                return out;
              },
              spec};
    return {[args](double x) {
              std::vector<double> out;
              for (double t : args) out.push_back(x + t);
              return out;
            },
            spec};
  }
  throw ConfigError("unknown multimap '" + spec + "'");
}

std::function<double(const double&)> make_potential(const std::string& spec) {
  const auto call = detail::parse_call(spec);
  if (call.name == "abs") {
    const double c = detail::numeric_args(call, 1)[0];
    if (c < 0.0) throw ConfigError("abs(c) potential needs c >= 0");
    return [c](const double& x) { return c * std::abs(x); };
  }
  if (call.name == "zero") {
    detail::numeric_args(call, 0);
    return [](const double&) { return 0.0; };
  }
  throw ConfigError("unknown potential '" + spec + "'");
}

ExperimentReport start(const ExperimentConfig& config) {
  ExperimentReport r;
  r.config = config;
  r.columns = find_experiment(config.experiment)->columns;
  return r;
}

void verdict(ExperimentReport& r, std::string name, Json value, bool passed, std::string provenance,
             bool asserted = true) {
  r.verdicts.push_back({std::move(name), std::move(value), asserted, passed, std::move(provenance)});
}

void info(ExperimentReport& r, std::string name, Json value, std::string provenance) {
  verdict(r, std::move(name), std::move(value), true, std::move(provenance), false);
}

// ---------------------------------------------------------------------------------------------
// Runners

ExperimentReport run_axioms(const ExperimentConfig& config) {
  auto r = start(config);
  const auto& p = config.parameters;
  const auto spec = str(p, "space");
  const auto sample_size = count(p, "sample_size");
  const auto triples = count(p, "triples");
  std::visit(
      [&](const auto& space) {
        std::mt19937_64 rng(derive_seed(config.seed, 0));
        std::vector<decltype(space.sample(rng))> sample;
        for (std::size_t i = 0; i < sample_size; ++i) sample.push_back(space.sample(rng));
        const auto exhaustive = verify_b_metric_axioms(space, sample);
        const auto fuzz = fuzz_b_metric_axioms(space, triples, derive_seed(config.seed, 1));
        r.rows.push_back({"exhaustive", space.label(), cell(sample_size), cell(exhaustive.pairs_checked),
                          cell(exhaustive.triples_checked), cell(exhaustive.violations.size())});
        r.rows.push_back({"fuzz", space.label(), cell(3 * triples), cell(fuzz.pairs_checked),
                          cell(fuzz.triples_checked), cell(fuzz.violations.size())});
        info(r, "s", space.s(), "bmetric.BMetricSpace::s");
        verdict(r, "axioms_hold", exhaustive.passed && fuzz.passed, exhaustive.passed && fuzz.passed,
                "bmetric.verify_b_metric_axioms + bmetric.fuzz_b_metric_axioms");
      },
      make_space(spec));
  return r;
}

ExperimentReport run_lemma41(const ExperimentConfig& config) {
  auto r = start(config);
  const auto& p = config.parameters;
  auto checkpoints = p.at("checkpoints").get<std::vector<std::size_t>>();
  if (checkpoints.empty()) throw ConfigError("lemma41 needs at least one checkpoint");
  const auto n_max = *std::max_element(checkpoints.begin(), checkpoints.end());
  const auto report = lemma41_orbit(num(p, "a"), num(p, "alpha"), num(p, "x0"), n_max, checkpoints);
  std::vector<double> errors;
  for (const auto& s : report.samples) {
    errors.push_back(report.relative_error(s));
    r.rows.push_back({cell(s.n), cell(s.x), cell(s.scaled), cell(errors.back())});
  }
  const double tol = num(p, "tolerance");
  info(r, "target", report.target, "comparison.lemma41_orbit (closed-form limit)");
  verdict(r, "final_relative_error", report.final_relative_error, report.final_relative_error < tol,
          "comparison.lemma41_orbit");
  bool monotone = true;
  for (std::size_t i = 1; i < errors.size(); ++i) monotone = monotone && errors[i] < errors[i - 1];
  verdict(r, "monotone_improvement", monotone, monotone, "comparison.AsymptoticReport::relative_error");
  return r;
}

ExperimentReport run_gamma_sweep(const ExperimentConfig& config) {
  auto r = start(config);
  const auto& p = config.parameters;
  const auto phi = make_comparison_function(str(p, "phi"));
  const double threshold = num(p, "threshold");
  bool below_for = true, above_against = true;
  for (double gamma : p.at("gammas").get<std::vector<double>>()) {
    const auto ev = gamma_summability_report(phi, gamma, num(p, "r"), count(p, "horizon"));
    const auto& s = *ev.series;
    r.rows.push_back({cell(gamma), to_string(ev.verdict), s.rule, cell(s.partial_half), cell(s.partial_full),
                      cell(s.relative_change), cell(s.ratio), cell(s.block_ratio)});
    const bool asserted = gamma != threshold;
    const bool expected = gamma < threshold ? ev.verdict == Verdict::EvidenceFor : ev.verdict == Verdict::EvidenceAgainst;
    if (gamma < threshold) below_for = below_for && expected;
    if (gamma > threshold) above_against = above_against && expected;
    verdict(r, "gamma=" + format_real(gamma), to_string(ev.verdict), !asserted || expected,
            "comparison.gamma_summability_report", asserted);
  }
  verdict(r, "flip_across_threshold", below_for && above_against, below_for && above_against,
          "comparison.gamma_summability_report");
  return r;
}

ExperimentReport run_claims(const ExperimentConfig& config) {
  auto r = start(config);
  const auto& p = config.parameters;
  const auto phi = make_comparison_function(str(p, "phi"));

  std::vector<double> grid;
  for (int i = 0; i <= 100; ++i) grid.push_back(i / 100.0);
  const auto comp = check_comparison_axioms(phi, grid, 1000, 1e-6);
  r.rows.push_back({"class", comp.claim.describe(), "", to_string(comp.verdict)});
  verdict(r, "comparison_function", to_string(comp.verdict), comp.verdict == Verdict::EvidenceFor,
          "comparison.check_comparison_axioms");

  for (double gamma : p.at("gammas").get<std::vector<double>>()) {
    const auto ev = gamma_summability_report(phi, gamma, num(p, "r"), count(p, "horizon"));
    r.rows.push_back({"class", ev.claim.describe(), cell(ev.series->partial_full), to_string(ev.verdict)});
    verdict(r, ev.claim.describe(), to_string(ev.verdict), ev.verdict == Verdict::EvidenceFor,
            "comparison.gamma_summability_report");
  }

  const auto ga = gamma_alpha_check(phi, num(p, "alpha"), num(p, "a"), num(p, "eps"), count(p, "grid_size"));
  r.rows.push_back({"class", ga.claim.describe(), "", to_string(ga.verdict)});
  verdict(r, ga.claim.describe(), to_string(ga.verdict), ga.verdict == Verdict::EvidenceFor,
          "comparison.gamma_alpha_check");

  const double threshold = num(p, "threshold");
  const auto bn = psi_b_min_bn_sequence(phi, num(p, "psi_a"), num(p, "b"), num(p, "r0"), count(p, "n_max"));
  std::optional<std::size_t> first;
  for (std::size_t n = 0; n < bn.size(); ++n) {
    const bool crossing = !first && bn[n] > threshold;
    if (crossing) first = n;
    if (n % 50 == 0 || crossing)
      r.rows.push_back({"min_bn", cell(n), cell(bn[n]), bn[n] > threshold ? "exceeds" : ""});
  }
  verdict(r, "min_bn_exceeds_threshold", first ? Json(*first) : Json(nullptr), first.has_value(),
          "comparison.psi_b_min_bn_sequence");
  return r;
}

ExperimentReport run_cauchy_fuzz(const ExperimentConfig& config) {
  auto r = start(config);
  const auto& p = config.parameters;
  const std::size_t trials = count(p, "trials");
  const std::size_t max_length = count(p, "max_length");
  if (max_length < 3) throw ConfigError("cauchy-fuzz needs max_length >= 3");
  const double gamma = num(p, "gamma");
  const auto space = snowflake(num(p, "q"));

  std::size_t tail_violations = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    std::mt19937_64 rng(derive_seed(config.seed, t));
    std::uniform_int_distribution<std::size_t> len(3, max_length);
    std::uniform_real_distribution<double> unit(-1.0, 1.0), decay(0.3, 1.0);
    const std::size_t L = len(rng);
    const double rho = decay(rng);
    std::vector<double> pts{unit(rng)};
    for (std::size_t i = 1; i < L; ++i) pts.push_back(pts.back() + unit(rng) * std::pow(rho, static_cast<double>(i)));
    const auto trace = OrbitTrace<double>::from_points(space, pts);
    const std::size_t horizon = trace.gaps.size() - 1;
    std::vector<double> bound(L, 0.0);
    for (std::size_t n = 1; n < L; ++n) bound[n] = tail_bound(trace, gamma, n, std::max(horizon, n)).value;
    std::size_t pairs = 0, violations = 0;
    double worst = 0.0;
    for (std::size_t n = 1; n < L; ++n)
      for (std::size_t m = n + 1; m < L; ++m) {
        ++pairs;
        const double d = space(pts[n], pts[m]);
        if (d > bound[n]) ++violations;
        if (bound[n] > 0.0) worst = std::max(worst, d / bound[n]);
      }
    tail_violations += violations;
    r.rows.push_back({"tail_bound", space.label(), cell(t), cell(L), cell(pairs), cell(violations), cell(worst)});
  }
  info(r, "M", big_M(space.s(), gamma), "cauchy.big_M");
  verdict(r, "tail_bound_violations", tail_violations, tail_violations == 0, "cauchy.tail_bound");

  std::size_t dyadic_violations = 0;
  const auto spaces = p.at("dyadic_spaces").get<std::vector<std::string>>();
  for (std::size_t k = 0; k < spaces.size(); ++k) {
    std::visit(
        [&](const auto& sp) {
          for (std::size_t t = 0; t < trials; ++t) {
            std::mt19937_64 rng(derive_seed(config.seed, (k + 1) * 1000003 + t));
            std::vector<decltype(sp.sample(rng))> pts;
            for (std::size_t i = 0; i <= 64; ++i) pts.push_back(sp.sample(rng));
            const auto trace = OrbitTrace<typename decltype(pts)::value_type>::from_points(sp, std::move(pts));
            std::size_t pairs = 0, violations = 0;
            double worst = 0.0;
            for (std::size_t n = 0; n <= 6; ++n)
              for (std::size_t kk = 1; kk <= (std::size_t{1} << n); ++kk) {
                const auto res = lemma21_check(trace, n, kk);
                ++pairs;
                if (!*res.ok) ++violations;
                if (res.bound > 0.0) worst = std::max(worst, *res.actual / res.bound);
              }
            dyadic_violations += violations;
            r.rows.push_back({"dyadic_sum", sp.label(), cell(t), cell(std::size_t{65}), cell(pairs), cell(violations),
                              cell(worst)});
          }
        },
        make_space(spaces[k]));
  }
  verdict(r, "dyadic_sum_violations", dyadic_violations, dyadic_violations == 0, "cauchy.lemma21_check");
  return r;
}

ExperimentReport run_solve(const ExperimentConfig& config) {
  auto r = start(config);
  const auto& p = config.parameters;
  const auto space = make_scalar_space(str(p, "space"));
  const auto f = make_self_map(str(p, "map"));
  const double x0 = num(p, "x0");
  const auto solver = str(p, "solver");
  const std::optional<double> expected =
      p.at("expected_fixed_point").is_null() ? std::nullopt : std::optional<double>(num(p, "expected_fixed_point"));

  SolveReport<double> report;
  if (solver == "boyd-wong") {
    const auto phi = make_comparison_function(str(p, "phi"));
    BoydWongOptions opts;
    opts.eps = num(p, "eps");
    opts.max_iter = count(p, "max_iter");
    report = boyd_wong_solve(space, f, phi, num(p, "gamma"), x0, opts);
    const auto seeds = p.at("seeds").get<std::vector<double>>();
    if (!seeds.empty()) {
      const auto u = uniqueness_probe(space, f, phi, num(p, "gamma"), seeds, opts);
      verdict(r, "unique", u.inconclusive ? Json("inconclusive") : Json(u.unique), u.unique && !u.inconclusive,
              "solvers.uniqueness_probe");
      info(r, "max_pairwise_limit_distance", u.distances.size() ? u.distances.maxCoeff() : 0.0,
           "solvers.uniqueness_probe");
    }
  } else if (solver == "caristi") {
    CaristiData<double> data{make_potential(str(p, "potential")), num(p, "caristi_alpha")};
    CaristiOptions opts;
    opts.tol = num(p, "tol");
    opts.max_iter = count(p, "max_iter");
    report = caristi_solve(space, f, data, x0, opts);
  } else {
    throw ConfigError("unknown solver '" + solver + "' (expected boyd-wong or caristi)");
  }

  bool dominated = true;
  for (std::size_t n = 0; n < report.orbit.size(); ++n) {
    std::string bound, truth;
    if (solver == "boyd-wong" && n >= 1 && n - 1 < report.error_bound_history.size())
      bound = cell(report.error_bound_history[n - 1]);
    if (solver == "caristi" && n < report.error_bound_history.size()) bound = cell(report.error_bound_history[n]);
    if (expected) {
      const double err = space(report.orbit[n], *expected);
      truth = cell(err);
      if (solver == "boyd-wong" && n >= 1 && n - 1 < report.error_bound_history.size() &&
          err > report.error_bound_history[n - 1])
        dominated = false;
    }
    r.rows.push_back({cell(n), cell(report.orbit[n]), cell(report.gaps[n]), bound, truth});
  }
  verdict(r, "converged", report.converged, report.converged, "solvers." + std::string(solver == "caristi" ? "caristi_solve" : "boyd_wong_solve"));
  verdict(r, "hypothesis_violations", report.hypothesis_violations.size(), report.hypothesis_violations.empty(),
          "solvers.SolveReport::hypothesis_violations");
  if (expected && solver == "boyd-wong")
    verdict(r, "bound_dominates_true_error", dominated, dominated, "solvers.apriori_error");
  info(r, "report", to_json(report), "solvers.SolveReport");
  return r;
}

ExperimentReport run_solve_multi(const ExperimentConfig& config) {
  auto r = start(config);
  const auto& p = config.parameters;
  const auto space = make_scalar_space(str(p, "space"));
  const auto T = make_multimap(str(p, "multimap"));
  const auto alpha = AlphaFunction<double>::constant(num(p, "alpha"));
  const auto phi = make_comparison_function(str(p, "phi"));
  const double gamma = num(p, "gamma");
  MultiSolveOptions opts;
  opts.tol = num(p, "tol");
  opts.max_iter = count(p, "max_iter");
  opts.slack = num(p, "slack");

  std::mt19937_64 rng(derive_seed(config.seed, 0));
  const double range = num(p, "pair_range");
  std::uniform_real_distribution<double> unif(-range, range);
  std::vector<std::pair<double, double>> pairs;
  for (std::size_t i = 0; i < count(p, "certify_pairs"); ++i) {
    const double x = unif(rng);
    pairs.emplace_back(x, unif(rng));
  }
  const auto cert = certify_hypotheses(space, T, alpha, phi, pairs);
  verdict(r, "hypotheses_certified", cert.passed, cert.passed, "multivalued.certify_hypotheses");

  try {
    const auto report = multivalued_solve(space, T, alpha, phi, gamma, num(p, "x0"), num(p, "x1"), opts);
    for (std::size_t n = 0; n < report.orbit.size(); ++n) {
      const bool has_step = n < report.gaps.size();
      r.rows.push_back({cell(n), cell(report.orbit[n]), has_step ? cell(report.gaps[n]) : "",
                        has_step ? cell(report.majorant[n]) : "",
                        has_step ? cell(report.admissibility_trace[n]) : ""});
    }
    verdict(r, "converged", report.converged, report.converged, "multivalued.multivalued_solve");
    verdict(r, "gap_majorant_ok", report.gap_majorant_ok, report.gap_majorant_ok, "multivalued.multivalued_solve");
    info(r, "fixed_point", report.fixed_point, "multivalued.multivalued_solve");
    info(r, "iterations", report.iterations, "multivalued.multivalued_solve");
    verdict(r, "residual", report.residual, report.residual <= opts.tol, "multivalued.multivalued_solve");
    if (report.certificate)
      verdict(r, "cauchy_certificate", to_string(report.certificate->verdict),
              report.certificate->verdict == CauchyVerdict::Certified, "cauchy.cauchy_report");
    if (report.limit_admissible)
      verdict(r, "limit_admissible", *report.limit_admissible, *report.limit_admissible,
              "multivalued.multivalued_solve (post-hoc audit)");
  } catch (const AdmissibleSuccessorNotFound& e) {
    verdict(r, "converged", std::string("admissible successor not found at step ") + std::to_string(e.step()) + ": " +
                                e.what(),
            false, "multivalued.multivalued_solve");
  }

  std::vector<std::pair<double, double>> starts;
  for (const auto& pr : p.at("start_pairs")) starts.emplace_back(pr[0].get<double>(), pr[1].get<double>());
  if (!starts.empty()) {
    const auto probe = weakly_picard_probe(space, T, alpha, phi, gamma, starts, opts);
    verdict(r, "start_pairs_valid", probe.valid, probe.valid == starts.size(), "multivalued.weakly_picard_probe");
    verdict(r, "weakly_picard_fraction", probe.fraction, probe.fraction == 1.0, "multivalued.weakly_picard_probe");
  }
  return r;
}

ExperimentReport run_error_bound(const ExperimentConfig& config) {
  auto r = start(config);
  const auto& p = config.parameters;
  const auto phi = make_comparison_function(str(p, "phi"));
  const double gamma = num(p, "gamma"), s = num(p, "s"), d0 = num(p, "d0");
  const std::size_t horizon = count(p, "horizon"), ref_horizon = count(p, "reference_horizon");
  const double M = big_M(s, gamma);

  const auto majorant = iterates(phi, d0, ref_horizon);
  bool sound = true, monotone = true;
  double previous = std::numeric_limits<double>::infinity();
  auto ns = p.at("ns").get<std::vector<std::size_t>>();
  std::sort(ns.begin(), ns.end());
  for (std::size_t n : ns) {
    const auto b = apriori_error(phi, gamma, s, d0, n, std::max(horizon, n));
    double ref = 0.0;
    for (std::size_t i = n; i <= ref_horizon && i < majorant.size(); ++i)
      ref += std::pow(static_cast<double>(i), gamma) * majorant[i];
    ref *= s * M;
    sound = sound && (b.truncated || b.value >= ref * (1.0 - 1e-12));
    monotone = monotone && b.value <= previous;
    previous = b.value;
    r.rows.push_back({cell(n), cell(b.value), cell(ref), cell(b.ratio), b.truncated ? "true" : "false"});
  }
  info(r, "M", M, "cauchy.big_M");
  verdict(r, "bound_dominates_reference", sound, sound, "solvers.apriori_error");
  verdict(r, "monotone_in_n", monotone, monotone, "solvers.apriori_error");

  const std::size_t sup_n = count(p, "sup_n");
  std::size_t sup_violations = 0;
  double worst = 0.0;
  for (const auto& pr : p.at("sup_pairs")) {
    const double ss = pr[0].get<double>(), g = pr[1].get<double>();
    const double logM = std::log(big_M(ss, g));
    for (std::size_t n = 0; n <= sup_n; ++n) {
      const double nn = static_cast<double>(n);
      const double log_ratio = (nn + 1) * (nn + 2) * std::log(ss) - g * nn * nn * std::log(2.0) - logM;
      worst = std::max(worst, std::exp(log_ratio));
      if (log_ratio > std::log1p(1e-9)) ++sup_violations;
    }
  }
  info(r, "max_sup_ratio", worst, "cauchy.big_M");
  verdict(r, "sup_bound_violations", sup_violations, sup_violations == 0, "cauchy.big_M");
  return r;
}

// ---------------------------------------------------------------------------------------------

Json pairs_json(std::initializer_list<std::pair<double, double>> pairs) {
  Json out = Json::array();
  for (const auto& [a, b] : pairs) out.push_back(Json::array({a, b}));
  return out;
}

const std::vector<ExperimentDef>& registry() {
  static const std::vector<ExperimentDef> defs = {
      {"axioms",
       "exhaustive and randomized check of the b-metric axioms on a space",
       {"check", "space", "points", "pairs", "triples", "violations"},
       {{"space", PType::String, Json("snowflake(2)"), "space spec, see list-functions"},
        {"sample_size", PType::Integer, Json(24), "points drawn for the exhaustive check"},
        {"triples", PType::Integer, Json(10000), "random triples for the fuzz check"}},
       run_axioms},
      {"lemma41",
       "orbit of x - a x^alpha and its scaled convergence to the closed-form limit",
       {"n", "x_n", "scaled", "relative_error"},
       {{"a", PType::Number, Json(1.0), "coefficient a > 0"},
        {"alpha", PType::Number, Json(4.0 / 3.0), "exponent alpha > 1"},
        {"x0", PType::Number, Json(0.1), "start point"},
        {"checkpoints", PType::IntegerList, Json::array({100, 1000, 10000, 100000}), "indices n reported"},
        {"tolerance", PType::Number, Json(0.05), "bound on the final relative error"}},
       run_lemma41},
      {"gamma-sweep",
       "x^gamma-summability evidence for a comparison function across gamma",
       {"gamma", "verdict", "rule", "partial_half", "partial_full", "relative_change", "ratio", "block_ratio"},
       {{"phi", PType::String, Json("example_phi"), "comparison function"},
        {"r", PType::Number, Json(0.1), "start value"},
        {"horizon", PType::Integer, Json(200000), "series terms"},
        {"gammas", PType::NumberList, Json::array({1.6, 1.8, 2.0, 2.2, 2.5}), "exponents swept"},
        {"threshold", PType::Number, Json(2.0), "expected boundary: evidence-for below, evidence-against above"}},
       run_gamma_sweep},
      {"claims",
       "class-membership evidence for the example function and divergence of the minimal b_n",
       {"table", "key", "value", "verdict"},
       {{"phi", PType::String, Json("example_phi"), "comparison function"},
        {"r", PType::Number, Json(0.1), "start value of the summability series"},
        {"horizon", PType::Integer, Json(200000), "series terms"},
        {"gammas", PType::NumberList, Json::array({0.5, 1.0, 1.5, 1.8}), "exponents expected summable"},
        {"alpha", PType::Number, Json(4.0 / 3.0), "Gamma_alpha exponent"},
        {"a", PType::Number, Json(1.0), "Gamma_alpha coefficient"},
        {"eps", PType::Number, Json(27.0 / 64.0), "Gamma_alpha neighbourhood"},
        {"grid_size", PType::Integer, Json(10000), "grid points on [0, eps]"},
        {"b", PType::Number, Json(1.1), "Psi_b base b > 1"},
        {"psi_a", PType::Number, Json(0.99), "Psi_b coefficient a in (0,1)"},
        {"r0", PType::Number, Json(0.4), "Psi_b start value"},
        {"n_max", PType::Integer, Json(1000), "last index of the minimal b_n table"},
        {"threshold", PType::Number, Json(1000.0), "value the minimal b_n must exceed"}},
       run_claims},
      {"cauchy-fuzz",
       "random sequences against the weighted tail bound and the dyadic partial-sum bound",
       {"check", "space", "trial", "length", "pairs", "violations", "max_ratio"},
       {{"trials", PType::Integer, Json(1000), "sequences per check and space"},
        {"max_length", PType::Integer, Json(64), "longest tail-bound sequence"},
        {"q", PType::Number, Json(2.0), "snowflake exponent for the tail-bound check"},
        {"gamma", PType::Number, Json(2.0), "tail-bound exponent"},
        {"dyadic_spaces", PType::StringList,
         Json::array({"snowflake(2)", "snowflake(3)", "real_line", "lp(0.5,3)", "discrete(6)"}),
         "spaces for the dyadic partial-sum check"}},
       run_cauchy_fuzz},
      {"solve",
       "single-valued fixed-point solve with per-iteration bounds",
       {"n", "x_n", "gap", "bound", "true_error"},
       {{"solver", PType::String, Json("boyd-wong"), "boyd-wong or caristi"},
        {"space", PType::String, Json("snowflake(2)"), "snowflake(q) or real_line"},
        {"map", PType::String, Json("scale(1/2)"), "self map"},
        {"phi", PType::String, Json("linear(1/4)"), "comparison function (boyd-wong)"},
        {"gamma", PType::Number, std::nullopt, "summability exponent, > log2 s"},
        {"x0", PType::Number, Json(1.0), "start point"},
        {"eps", PType::Number, Json(1e-9), "target a-priori bound (boyd-wong)"},
        {"max_iter", PType::Integer, Json(1000), "iteration cap"},
        {"seeds", PType::NumberList, Json::array(), "uniqueness probe seeds (boyd-wong)"},
        {"expected_fixed_point", PType::Number, Json(nullptr), "known fixed point for the true-error column"},
        {"potential", PType::String, Json("abs(2)"), "Caristi potential"},
        {"caristi_alpha", PType::Number, Json(1.5), "Caristi factor > 1"},
        {"tol", PType::Number, Json(1e-12), "Caristi stopping tolerance"}},
       run_solve},
      {"solve-multi",
       "set-valued orbit construction with hypothesis certification",
       {"n", "x_n", "gap", "majorant", "alpha"},
       {{"space", PType::String, Json("snowflake(2)"), "snowflake(q) or real_line"},
        {"multimap", PType::String, Json("scales(1/2,1/3)"), "set-valued map"},
        {"alpha", PType::Number, Json(1.0), "constant admissibility function value"},
        {"phi", PType::String, Json("linear(1/4)"), "comparison function"},
        {"gamma", PType::Number, std::nullopt, "summability exponent, > log2 s"},
        {"x0", PType::Number, Json(1.0), "start point"},
        {"x1", PType::Number, Json(0.5), "first successor, in T(x0)"},
        {"tol", PType::Number, Json(0.0), "residual tolerance; 0 means exact membership"},
        {"max_iter", PType::Integer, Json(10000), "iteration cap"},
        {"slack", PType::Number, Json(1.0), "slack q >= 1 on the gap majorant"},
        {"certify_pairs", PType::Integer, Json(1000), "random pairs for hypothesis certification"},
        {"pair_range", PType::Number, Json(2.0), "pairs drawn from [-range, range]"},
        {"start_pairs", PType::PairList, pairs_json({{1, 0.5}, {2, 1}, {-1, -0.5}, {0.3, 0.15}, {-3, -1}}),
         "start pairs (x, y in T(x)) for the weakly Picard probe"}},
       run_solve_multi},
      {"error-bound",
       "a-priori error bound against a long reference sum, and the constant M against its defining supremum",
       {"n", "bound", "reference", "ratio", "truncated"},
       {{"phi", PType::String, Json("linear(1/4)"), "comparison function"},
        {"gamma", PType::Number, Json(2.0), "summability exponent"},
        {"s", PType::Number, Json(2.0), "relaxation constant"},
        {"d0", PType::Number, Json(1.0), "initial gap d(x0, x1)"},
        {"ns", PType::IntegerList, Json::array({1, 2, 5, 10, 20, 40}), "indices n >= 1"},
        {"horizon", PType::Integer, Json(60), "terms summed before tail extrapolation"},
        {"reference_horizon", PType::Integer, Json(256), "terms of the reference sum"},
        {"sup_pairs", PType::PairList, pairs_json({{1.5, 1}, {2, 1.5}, {2, 2}, {4, 3}}), "(s, gamma) pairs"},
        {"sup_n", PType::Integer, Json(200), "largest n in the supremum check"}},
       run_error_bound},
  };
  return defs;
}

std::string csv_escape(const std::string& cell) {
  if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

ExperimentConfig validate_config(const Json& raw) {
  std::vector<std::string> problems;
  ExperimentConfig config;
  if (!raw.is_object()) throw ConfigError("config must be a JSON object");

  for (const auto& [key, _] : raw.items())
    if (key != "experiment" && key != "parameters" && key != "output" && key != "seed")
      problems.push_back("unknown key '" + key + "'");

  const ExperimentDef* def = nullptr;
  if (!raw.contains("experiment")) {
    problems.push_back("missing 'experiment'");
  } else if (!raw.at("experiment").is_string()) {
    problems.push_back("'experiment' must be a string");
  } else {
    config.experiment = raw.at("experiment").get<std::string>();
    def = find_experiment(config.experiment);
    if (!def) {
      std::string known;
      for (const auto& d : registry()) known += (known.empty() ? "" : ", ") + d.name;
      problems.push_back("unknown experiment '" + config.experiment + "' (known: " + known + ")");
    }
  }

  if (raw.contains("seed")) {
    if (auto s = coerce_integer(raw.at("seed")))
      config.seed = *s;
    else
      problems.push_back("'seed' must be a non-negative integer");
  }
  if (raw.contains("output")) {
    if (raw.at("output").is_string())
      config.output = raw.at("output").get<std::string>();
    else
      problems.push_back("'output' must be a string");
  }

  Json params = Json::object();
  if (raw.contains("parameters")) {
    if (raw.at("parameters").is_object())
      params = raw.at("parameters");
    else
      problems.push_back("'parameters' must be an object");
  }
  config.parameters = Json::object();
  if (def) {
    for (const auto& [key, _] : params.items()) {
      const bool known = std::any_of(def->params.begin(), def->params.end(), [&](const ParamSpec& s) { return s.name == key; });
      if (!known) problems.push_back("unknown parameter '" + key + "' for experiment '" + def->name + "'");
    }
    for (const auto& spec : def->params) {
      if (params.contains(spec.name)) {
        if (auto v = coerce(params.at(spec.name), spec.type))
          config.parameters[spec.name] = *v;
        else
          problems.push_back("parameter '" + spec.name + "' must be a " + type_name(spec.type));
      } else if (spec.default_value) {
        config.parameters[spec.name] = *spec.default_value;
      } else {
        problems.push_back("missing required parameter '" + spec.name + "' for experiment '" + def->name + "'");
      }
    }
  }

  if (!problems.empty()) {
    std::string msg = "invalid config: ";
    for (std::size_t i = 0; i < problems.size(); ++i) msg += (i ? "; " : "") + problems[i];
    throw ConfigError(msg);
  }
  return config;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  const auto* def = find_experiment(config.experiment);
  if (!def) throw ConfigError("unknown experiment '" + config.experiment + "'");
  const auto t0 = std::chrono::steady_clock::now();
  auto report = def->run(config);
  report.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

bool ExperimentReport::all_passed() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const VerdictEntry& v) { return !v.asserted || v.passed; });
}

std::string ExperimentReport::rows_csv() const {
  std::string out;
  for (std::size_t i = 0; i < columns.size(); ++i) out += (i ? "," : "") + csv_escape(columns[i]);
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + csv_escape(row[i]);
    out += '\n';
  }
  return out;
}

Json ExperimentReport::verdicts_json() const {
  Json list = Json::array();
  for (const auto& v : verdicts)
    list.push_back(Json{{"name", v.name},
                        {"value", v.value},
                        {"asserted", v.asserted},
                        {"passed", v.passed},
                        {"provenance", v.provenance}});
  Json out{{"experiment", config.experiment}, {"seed", config.seed}, {"parameters", config.parameters}};
  out["verdicts"] = list;
  out["all_passed"] = all_passed();
  out["runtime_seconds"] = runtime_seconds;
  return out;
}

void write_report(const ExperimentReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream rows(dir / "rows.csv", std::ios::binary);
  rows << report.rows_csv();
  std::ofstream verdicts(dir / "verdicts.json", std::ios::binary);
  verdicts << report.verdicts_json().dump(2) << '\n';
  if (!rows || !verdicts) throw Error("could not write report files to " + dir.string());
}

std::vector<ExperimentInfo> experiment_catalog() {
  std::vector<ExperimentInfo> out;
  for (const auto& d : registry()) out.push_back({d.name, d.summary, d.columns});
  return out;
}

std::vector<std::pair<std::string, std::vector<std::string>>> function_catalog() {
  return {{"comparison functions", comparison_function_names()},
          {"spaces", {"snowflake(q)", "real_line", "lp(p,dim)", "discrete(n)", "matrix(path.csv)"}},
          {"maps", {"scale(c)", "shift(t)", "affine(c,t)", "identity"}},
          {"multimaps", {"scales(c1,c2,...)", "shifts(t1,t2,...)"}},
          {"potentials", {"abs(c)", "zero"}}};
}

std::string experiments_help() {
  std::ostringstream out;
  out << "Experiments (config: {\"experiment\": name, \"parameters\": {...}, \"seed\": u64, \"output\": dir}):\n";
  for (const auto& d : registry()) {
    out << "\n  " << d.name << ": " << d.summary << "\n    rows.csv columns: ";
    for (std::size_t i = 0; i < d.columns.size(); ++i) out << (i ? "," : "") << d.columns[i];
    out << "\n    parameters:\n";
    for (const auto& p : d.params) {
      out << "      " << p.name << " (" << type_name(p.type) << ", ";
      if (!p.default_value)
        out << "required";
      else if (p.default_value->is_null())
        out << "optional";
      else
        out << "default " << p.default_value->dump();
      out << "): " << p.doc << '\n';
    }
  }
  out << "\nNumbers may also be given as \"p/q\" strings.\n";
  return out.str();
}

}  // namespace bfix
