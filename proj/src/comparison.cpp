#include "bfix/comparison.hpp"

#include "bfix/errors.hpp"
#include "bfix/point.hpp"
#include "call_spec.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace bfix {

double ComparisonFunction::operator()(double r) const {
  if (!(r >= 0.0)) throw DomainError(label + " evaluated at negative or NaN argument " + format_real(r));
  const double v = eval(r);
  if (!std::isfinite(v) || v < 0.0)
    throw RangeError(label + "(" + format_real(r) + ") = " + format_real(v) + " is outside [0, inf)");
  return v;
}

double iterate(const ComparisonFunction& phi, std::size_t n, double r) {
  if (!(r >= 0.0)) throw DomainError("iterate: r must be >= 0");
  for (std::size_t k = 0; k < n; ++k) r = phi(r);
  return r;
}

std::vector<double> iterates(const ComparisonFunction& phi, double r, std::size_t n_max) {
  if (!(r >= 0.0)) throw DomainError("iterates: r must be >= 0");
  std::vector<double> out;
  out.reserve(n_max + 1);
  out.push_back(r);
  for (std::size_t k = 0; k < n_max; ++k) out.push_back(phi(out.back()));
  return out;
}

namespace {

constexpr double kBreak = 27.0 / 64.0;   // exact in binary
constexpr double kPlateau = 27.0 / 256.0;

std::int64_t integer_cbrt(std::int64_t v) {
  auto c = static_cast<std::int64_t>(std::llround(std::cbrt(static_cast<double>(v))));
  while (c * c * c > v) --c;
  while ((c + 1) * (c + 1) * (c + 1) <= v) ++c;
  return c;
}

}  // namespace

ComparisonFunction example_phi() {
  return {[](double x) {
            if (x < 0.0) throw DomainError("example_phi evaluated at negative argument " + format_real(x));
            // x^(4/3) as x * cbrt(x) keeps perfect cubes exact: (27/64)^(4/3) = 81/256.
            return x <= kBreak ? x - x * std::cbrt(x) : kPlateau;
          },
          "example_phi"};
}

std::optional<Rational> example_phi_exact(Rational x) {
  if (x < 0) throw DomainError("example_phi evaluated at a negative rational");
  if (x > Rational(27, 64)) return Rational(27, 256);
  const std::int64_t p = x.numerator(), q = x.denominator();
  constexpr std::int64_t limit = std::int64_t{1} << 42;
  if (p > limit || q > limit) return std::nullopt;
  const std::int64_t cp = integer_cbrt(p), cq = integer_cbrt(q);
  if (cp * cp * cp != p || cq * cq * cq != q) return std::nullopt;
  return x - x * Rational(cp, cq);
}

ComparisonFunction linear(double c) {
  if (!std::isfinite(c) || c < 0.0) throw ParameterError("linear(c) needs c >= 0, got " + format_real(c));
  return {[c](double t) { return c * t; }, "linear(" + format_real(c) + ")"};
}

ComparisonFunction quadratic_gap(double a, double alpha) {
  if (!(a > 0.0) || !(alpha > 1.0) || !std::isfinite(a) || !std::isfinite(alpha))
    throw ParameterError("quadratic_gap(a, alpha) needs a > 0 and alpha > 1");
  const double peak = std::pow(a * alpha, -1.0 / (alpha - 1.0));
  const double plateau = peak - a * std::pow(peak, alpha);
  return {[a, alpha, peak, plateau](double x) {
            if (x < 0.0) throw DomainError("quadratic_gap evaluated at negative argument");
            return x <= peak ? x - a * std::pow(x, alpha) : plateau;
          },
          "quadratic_gap(" + format_real(a) + "," + format_real(alpha) + ")"};
}

ComparisonFunction make_comparison_function(const std::string& spec) {
  const auto call = detail::parse_call(spec);
  if (call.name == "example_phi") {
    detail::numeric_args(call, 0);
    return example_phi();
  }
  if (call.name == "linear") return linear(detail::numeric_args(call, 1)[0]);
  if (call.name == "quadratic_gap") {
    const auto args = detail::numeric_args(call, 2);
    return quadratic_gap(args[0], args[1]);
  }
  throw ConfigError("unknown comparison function '" + spec + "'");
}

std::vector<std::string> comparison_function_names() {
  return {"example_phi", "linear(c)", "quadratic_gap(a,alpha)"};
}

std::string ClassClaim::describe() const {
  std::ostringstream out;
  switch (kind) {
    case Kind::Comparison: out << "comparison"; break;
    case Kind::GammaGamma: out << "Gamma^gamma(gamma=" << format_real(gamma) << ")"; break;
    case Kind::GammaAlpha:
      out << "Gamma_alpha(alpha=" << format_real(alpha) << ", a=" << format_real(a) << ", eps=" << format_real(eps)
          << ")";
      break;
    case Kind::PsiB: out << "Psi_b(b=" << format_real(b) << ")"; break;
  }
  return out.str();
}

ClassEvidence check_comparison_axioms(const ComparisonFunction& phi, std::span<const double> r_grid,
                                      std::size_t horizon, double tol) {
  for (std::size_t i = 0; i < r_grid.size(); ++i) {
    if (!(r_grid[i] >= 0.0)) throw PreconditionError("comparison grid values must be >= 0");
    if (i && r_grid[i] < r_grid[i - 1]) throw PreconditionError("comparison grid must be sorted");
  }
  ClassEvidence ev;
  ev.claim = ClassClaim::comparison();
  ev.horizon = horizon;
  ev.verdict = Verdict::EvidenceFor;
  auto against = [&](Witness w) {
    ev.verdict = Verdict::EvidenceAgainst;
    ev.witness = std::move(w);
    return ev;
  };

  std::vector<double> values;
  for (double r : r_grid) values.push_back(phi(r));
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] < values[i - 1])
      return against({"monotonicity: phi(r_prev) > phi(r)", r_grid[i], i, values[i - 1], values[i]});
  for (std::size_t i = 0; i < values.size(); ++i)
    if (r_grid[i] > 0.0 && !(values[i] < r_grid[i]))
      return against({"phi(r) >= r", r_grid[i], i, values[i], r_grid[i]});

  for (std::size_t i = 0; i < r_grid.size(); ++i) {
    double v = r_grid[i];
    for (std::size_t n = 0; n < horizon; ++n) {
      const double next = phi.eval(v);
      if (std::isnan(next) || next < 0.0)
        throw RangeError(phi.label + " produced " + format_real(next) + " while iterating");
      if (std::isinf(next)) return against({"iterates grow without bound", r_grid[i], n + 1, next, tol});
      v = next;
    }
    if (!(v < tol)) return against({"phi^[N](r) >= tol", r_grid[i], horizon, v, tol});
  }
  return ev;
}

ClassEvidence gamma_summability_report(const ComparisonFunction& phi, double gamma, double r, std::size_t horizon,
                                       const SeriesCriterion& criterion) {
  if (!(gamma > 0.0)) throw PreconditionError("gamma must be > 0");
  if (!(r >= 0.0)) throw PreconditionError("r must be >= 0");
  ClassEvidence ev;
  ev.claim = ClassClaim::gamma_gamma(gamma);
  ev.horizon = horizon;

  std::vector<double> terms(horizon + 1, 0.0);
  double v = r;  // phi^[n](r)
  for (std::size_t n = 1; n <= horizon; ++n) {
    v = phi.eval(v);
    if (std::isnan(v) || v < 0.0) throw RangeError(phi.label + " produced " + format_real(v) + " while iterating");
    terms[n] = std::pow(static_cast<double>(n), gamma) * v;
    if (std::isinf(v)) {
      terms.resize(n + 1);
      break;
    }
  }
  ev.series = classify_series(terms, criterion);
  ev.partial_sums = partial_sums(terms);
  ev.verdict = ev.series->verdict;
  if (ev.series->overflow_index) {
    const auto i = *ev.series->overflow_index;
    ev.witness = Witness{"partial sum overflow", r, i, terms[i], std::numeric_limits<double>::max()};
  } else if (ev.verdict == Verdict::EvidenceAgainst) {
    ev.witness = Witness{"S_N / S_{N/2} exceeds the divergence ratio", r, horizon, ev.series->ratio,
                         criterion.divergence_ratio};
  }
  ev.note = "decided by rule: " + ev.series->rule;
  return ev;
}

ClassEvidence gamma_alpha_check(const ComparisonFunction& phi, double alpha, double a, double eps,
                                std::size_t grid_size) {
  if (!(alpha > 1.0) || !(a > 0.0) || !(eps > 0.0)) throw ParameterError("gamma_alpha_check needs alpha > 1, a > 0, eps > 0");
  if (grid_size < 2) throw ParameterError("gamma_alpha_check needs grid_size >= 2");
  ClassEvidence ev;
  ev.claim = ClassClaim::gamma_alpha(alpha, a, eps);
  ev.horizon = grid_size;
  ev.verdict = Verdict::EvidenceFor;
  const double last = static_cast<double>(grid_size - 1);
  for (std::size_t i = 0; i < grid_size; ++i) {
    const double x = i + 1 == grid_size ? eps : eps * static_cast<double>(i) / last;
    const double bound = x - a * std::pow(x, alpha);
    if (bound < -1e-12 * x)
      throw ParameterError("x - a x^alpha < 0 at grid point " + format_real(x) + "; shrink eps");
    const double value = phi(x);
    if (value > bound + 1e-12 * x) {
      ev.verdict = Verdict::EvidenceAgainst;
      ev.witness = Witness{"phi(x) > x - a x^alpha", x, i, value, bound};
      return ev;
    }
  }
  return ev;
}

double AsymptoticReport::relative_error(const AsymptoticSample& s) const {
  return std::abs(s.scaled - target) / target;
}

double gap_recursion_limit(double a, double alpha) { return std::pow(a, -1.0 / (alpha - 1.0)); }

AsymptoticReport lemma41_orbit(double a, double alpha, double x0, std::size_t n_max,
                               std::vector<std::size_t> checkpoints) {
  if (!(a > 0.0) || !(alpha > 1.0)) throw ParameterError("lemma41_orbit needs a > 0 and alpha > 1");
  const double limit = gap_recursion_limit(a, alpha);
  if (!(x0 >= 0.0) || x0 > limit)
    throw ParameterError("x0 = " + format_real(x0) + " outside the admissible range [0, " + format_real(limit) +
                         "] where x - a x^alpha >= 0");
  std::sort(checkpoints.begin(), checkpoints.end());
  checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()), checkpoints.end());
  if (!checkpoints.empty() && checkpoints.back() > n_max)
    throw ParameterError("checkpoint " + std::to_string(checkpoints.back()) + " beyond n_max");

  AsymptoticReport report;
  report.a = a;
  report.alpha = alpha;
  report.x0 = x0;
  const double exponent = 1.0 / (alpha - 1.0);
  report.target = std::pow(1.0 / (a * (alpha - 1.0)), exponent);

  double x = x0;
  auto next = checkpoints.begin();
  for (std::size_t n = 0; n <= n_max && next != checkpoints.end(); ++n) {
    if (n == *next) {
      report.samples.push_back({n, x, x * std::pow(static_cast<double>(n), exponent)});
      ++next;
    }
    x -= a * std::pow(x, alpha);
  }
  if (!report.samples.empty()) report.final_relative_error = report.relative_error(report.samples.back());
  return report;
}

namespace {

void check_psi_params(double a, double b, double r0) {
  if (!(a > 0.0 && a < 1.0)) throw ParameterError("Psi_b needs a in (0,1)");
  if (!(b > 1.0) || !std::isfinite(b)) throw ParameterError("Psi_b needs b > 1");
  if (!(r0 >= 0.0)) throw ParameterError("Psi_b needs r0 >= 0");
}

// b^n (b phi^[n+1] - a phi^[n]) evaluated in log space so large n cannot produce inf - inf.
double min_bn(double a, double b, std::size_t n, double cur, double next) {
  const double inner = b * next - a * cur;
  if (!(inner > 0.0)) return 0.0;
  return std::exp(static_cast<double>(n) * std::log(b) + std::log(inner));
}

}  // namespace

double psi_b_min_bn(const ComparisonFunction& phi, double a, double b, double r0, std::size_t n) {
  check_psi_params(a, b, r0);
  const double cur = iterate(phi, n, r0);
  return min_bn(a, b, n, cur, phi(cur));
}

std::vector<double> psi_b_min_bn_sequence(const ComparisonFunction& phi, double a, double b, double r0,
                                          std::size_t n_max) {
  check_psi_params(a, b, r0);
  const auto orbit = iterates(phi, r0, n_max + 1);
  std::vector<double> out(n_max + 1);
  for (std::size_t n = 0; n <= n_max; ++n) out[n] = min_bn(a, b, n, orbit[n], orbit[n + 1]);
  return out;
}

double MajorizationMode::coefficient(std::size_t n, double gamma) const {
  if (kind == Kind::ConstantA) return value;
  if (n == 0) throw PreconditionError("power-mode coefficient a_n is undefined at n = 0");
  const double base = static_cast<double>(n - 1) / static_cast<double>(n);
  return base == 0.0 ? 0.0 : std::pow(base, value + 1.0 + gamma);
}

ClassEvidence majorization_check(const ComparisonFunction& phi, const MajorizationMode& mode,
                                 std::span<const double> b_seq, double gamma, double r, std::size_t horizon,
                                 const SeriesCriterion& criterion) {
  if (!(gamma > 0.0)) throw PreconditionError("gamma must be > 0");
  if (!(r >= 0.0)) throw PreconditionError("r must be >= 0");
  if (mode.kind == MajorizationMode::Kind::ConstantA && !(mode.value > 0.0 && mode.value < 1.0))
    throw PreconditionError("constant_a mode needs a in (0,1)");
  if (mode.kind == MajorizationMode::Kind::Power && !(mode.value > 0.0))
    throw PreconditionError("power mode needs eps > 0");
  if (b_seq.size() < horizon + 1)
    throw LengthError("b_seq has " + std::to_string(b_seq.size()) + " terms, horizon needs " +
                      std::to_string(horizon + 1));
  for (double bn : b_seq.first(horizon + 1))
    if (!(bn >= 0.0) || !std::isfinite(bn)) throw PreconditionError("b_seq terms must be finite and >= 0");

  ClassEvidence ev;
  ev.claim = ClassClaim::gamma_gamma(gamma);
  ev.horizon = horizon;

  const auto orbit = iterates(phi, r, horizon + 1);
  const std::size_t start = mode.kind == MajorizationMode::Kind::Power ? 1 : 0;
  for (std::size_t n = start; n <= horizon; ++n) {
    const double rhs = mode.coefficient(n, gamma) * orbit[n] + b_seq[n];
    if (orbit[n + 1] > rhs * (1.0 + 1e-12)) {
      ev.verdict = Verdict::EvidenceAgainst;
      ev.witness = Witness{"premise phi^[n+1](r) <= a_n phi^[n](r) + b_n fails", r, n, orbit[n + 1], rhs};
      return ev;
    }
  }

  const double power = mode.kind == MajorizationMode::Kind::ConstantA ? gamma : mode.value + 1.0 + gamma;
  std::vector<double> terms(horizon + 1, 0.0);
  for (std::size_t n = 1; n <= horizon; ++n) terms[n] = std::pow(static_cast<double>(n), power) * b_seq[n];
  ev.series = classify_series(terms, criterion);
  ev.partial_sums = partial_sums(terms);
  if (ev.series->verdict == Verdict::EvidenceFor) {
    ev.verdict = Verdict::EvidenceFor;
    ev.note = "premise holds; weighted b_n series: " + ev.series->rule;
  } else {
    ev.verdict = Verdict::Inconclusive;
    ev.note = "premise holds but the weighted b_n series is " + std::string(to_string(ev.series->verdict)) +
              "; the sufficient condition is not met";
  }
  return ev;
}

ClassEvidence psi_b_membership_via_prop44(const ComparisonFunction& phi, double a, double b,
                                          std::span<const double> b_seq, double gamma, double r,
                                          std::size_t horizon, const SeriesCriterion& criterion) {
  check_psi_params(a, b, r);
  if (b_seq.size() < horizon + 1)
    throw LengthError("b_seq has " + std::to_string(b_seq.size()) + " terms, horizon needs " +
                      std::to_string(horizon + 1));
  const auto summable = classify_series(b_seq.first(horizon + 1), criterion);
  if (summable.verdict == Verdict::EvidenceAgainst)
    throw ParameterError("b_seq must be summable (series test: " + summable.rule + ")");

  const auto orbit = iterates(phi, r, horizon + 1);
  const double log_b = std::log(b);
  // b^{n+1} phi^[n+1] <= a b^n phi^[n] + b_n, divided through by b^n.
  for (std::size_t n = 0; n <= horizon; ++n) {
    const double lhs = b * orbit[n + 1];
    const double rhs = a * orbit[n] + b_seq[n] * std::exp(-static_cast<double>(n) * log_b);
    if (lhs > rhs * (1.0 + 1e-12)) {
      ClassEvidence ev;
      ev.claim = ClassClaim::psi_b(b);
      ev.horizon = horizon;
      ev.verdict = Verdict::EvidenceAgainst;
      ev.witness = Witness{"b^{n+1} phi^[n+1](r) > a b^n phi^[n](r) + b_n (scaled by b^-n)", r, n, lhs, rhs};
      return ev;
    }
  }

  std::vector<double> reduced(horizon + 1);
  for (std::size_t n = 0; n <= horizon; ++n)
    reduced[n] = b_seq[n] * std::exp(-static_cast<double>(n + 1) * log_b);
  auto ev = majorization_check(phi, MajorizationMode::constant_a(a / b), reduced, gamma, r, horizon, criterion);
  ev.note = "Psi_b inequality holds; reduced to constant a/b = " + format_real(a / b) + ": " + ev.note;
  return ev;
}

}  // namespace bfix
