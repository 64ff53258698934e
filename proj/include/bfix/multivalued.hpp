#pragma once

#include "bfix/bmetric.hpp"
#include "bfix/cauchy.hpp"
#include "bfix/comparison.hpp"
#include "bfix/errors.hpp"

#include <Eigen/Core>

#include <cmath>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace bfix {

/// Set-valued map with finite, non-empty images.
template <class P>
struct MultiMap {
  std::function<std::vector<P>(const P&)> apply;
  std::string label;

  std::vector<P> operator()(const P& x) const {
    auto image = apply(x);
    if (image.empty()) throw EmptySetError("multimap '" + label + "' returned an empty image at " + format_point(x));
    return image;
  }
};

template <class P>
struct AlphaFunction {
  std::function<double(const P&, const P&)> eval;
  std::string label;

  double operator()(const P& x, const P& y) const {
    const double v = eval(x, y);
    if (!(v >= 0.0)) throw RangeError("alpha function '" + label + "' returned " + format_real(v));
    return v;
  }

  static AlphaFunction constant(double c) {
    if (!(c >= 0.0)) throw ParameterError("constant alpha must be >= 0");
    return {[c](const P&, const P&) { return c; }, "constant(" + format_real(c) + ")"};
  }
};

/// min of alpha(u, v) over A x B.
template <class P>
double alpha_star(const std::vector<P>& A, const std::vector<P>& B, const AlphaFunction<P>& alpha) {
  if (A.empty() || B.empty()) throw EmptySetError("alpha_star of an empty set");
  double best = alpha(A.front(), B.front());
  for (const auto& u : A)
    for (const auto& v : B) best = std::min(best, alpha(u, v));
  return best;
}

template <class P>
struct MultiWitness {
  std::string kind;  ///< "admissibility" or "contractivity"
  P x{};
  P y{};
  double lhs = 0.0;
  double rhs = 0.0;
};

template <class P>
struct HypothesisCertificate {
  bool passed = true;
  std::size_t pairs_checked = 0;
  std::vector<MultiWitness<P>> witnesses;
};

/// Checks alpha_* admissibility and alpha_*(Tx,Ty) h(Tx,Ty) <= phi(d(x,y)) on every sampled pair.
template <class P>
HypothesisCertificate<P> certify_hypotheses(const BMetricSpace<P>& space, const MultiMap<P>& T,
                                            const AlphaFunction<P>& alpha, const ComparisonFunction& phi,
                                            const std::vector<std::pair<P, P>>& pairs) {
  HypothesisCertificate<P> cert;
  for (const auto& [x, y] : pairs) {
    const auto Tx = T(x), Ty = T(y);
    const double a_star = alpha_star(Tx, Ty, alpha);
    const double a = alpha(x, y);
    if (a >= 1.0 && a_star < 1.0) cert.witnesses.push_back({"admissibility", x, y, a_star, 1.0});
    const double lhs = a_star * hausdorff_distance(Tx, Ty, space);
    const double rhs = phi(space(x, y));
    if (lhs > rhs * (1.0 + 1e-12)) cert.witnesses.push_back({"contractivity", x, y, lhs, rhs});
    ++cert.pairs_checked;
  }
  cert.passed = cert.witnesses.empty();
  return cert;
}

/// min over y in T(x) of d(x, y) <= tol. tol = 0 tests x in T(x) by point equality, since a
/// distance can underflow to 0 between distinct points.
template <class P>
bool is_fixed_point(const BMetricSpace<P>& space, const MultiMap<P>& T, const P& x, double tol) {
  const auto image = T(x);
  if (tol == 0.0) return contains(image, x);
  return point_set_distance(x, image, space) <= tol;
}

struct MultiSolveOptions {
  double tol = 0.0;
  std::size_t max_iter = 10000;
  double slack = 1.0;  ///< q >= 1 in d(x_n, x_{n+1}) <= q phi^[n](d(x_0, x_1))
};

template <class P>
struct MultiSolveReport {
  std::vector<P> orbit;
  P fixed_point{};
  std::size_t iterations = 0;
  double residual = 0.0;  ///< min over y in T(x*) of d(x*, y)
  bool converged = false;
  std::vector<double> gaps;       ///< d(x_n, x_{n+1})
  std::vector<double> majorant;   ///< phi^[n](d(x_0, x_1))
  bool gap_majorant_ok = true;
  std::vector<std::size_t> gap_majorant_failures;
  std::vector<double> admissibility_trace;  ///< alpha(x_n, x_{n+1})
  /// alpha(x_n, x*) >= 1 for every orbit point, audited after convergence.
  std::optional<bool> limit_admissible;
  std::vector<std::size_t> limit_admissibility_failures;
  std::optional<CauchyCertificate> certificate;
  std::string selection_rule = "nearest admissible successor, ties broken by set order";
};

/// Builds x_{n+1} in T(x_n) with alpha(x_n, x_{n+1}) >= 1, choosing the nearest such candidate,
/// until the residual min_{y in T(x_n)} d(x_n, y) drops to tol or max_iter steps are taken.
template <class P>
MultiSolveReport<P> multivalued_solve(const BMetricSpace<P>& space, const MultiMap<P>& T,
                                      const AlphaFunction<P>& alpha, const ComparisonFunction& phi, double gamma,
                                      const P& x0, const P& x1, const MultiSolveOptions& options = {}) {
  require_gamma_above_log2s(space.s(), gamma);
  if (!(options.slack >= 1.0)) throw PreconditionError("slack q must be >= 1");
  if (!(options.tol >= 0.0)) throw PreconditionError("tol must be >= 0");
  if (!contains(T(x0), x1)) throw PreconditionError("start pair needs x1 in T(x0)");

  MultiSolveReport<P> report;
  report.orbit.push_back(x0);
  const auto image0 = T(x0);
  const double first_residual = point_set_distance(x0, image0, space);
  if (options.tol == 0.0 ? contains(image0, x0) : first_residual <= options.tol) {
    report.fixed_point = x0;
    report.residual = first_residual;
    report.converged = true;
    report.limit_admissible = true;
    return report;
  }
  const double a01 = alpha(x0, x1);
  if (a01 < 1.0) throw AdmissibleSuccessorNotFound(0, "alpha(x0, x1) = " + format_real(a01) + " < 1");

  const double relative_slack = options.slack * (1.0 + 1e-9) - 1.0;
  report.orbit.push_back(x1);
  report.gaps.push_back(space(x0, x1));
  report.majorant.push_back(report.gaps.back());
  report.admissibility_trace.push_back(a01);

  for (std::size_t n = 1;; ++n) {
    const P x = report.orbit.back();
    const auto image = T(x);
    Eigen::VectorXd dist(static_cast<Eigen::Index>(image.size()));
    for (std::size_t j = 0; j < image.size(); ++j) dist[static_cast<Eigen::Index>(j)] = space(x, image[j]);
    report.residual = dist.minCoeff();
    report.fixed_point = x;
    report.iterations = n;
    if (options.tol == 0.0 ? contains(image, x) : report.residual <= options.tol) {
      report.converged = report.gap_majorant_ok;
      break;
    }
    if (n >= options.max_iter) break;

    std::optional<std::size_t> pick;
    double pick_alpha = 0.0;
    for (std::size_t j = 0; j < image.size(); ++j) {
      const double a = alpha(x, image[j]);
      if (a < 1.0) continue;
      if (!pick || dist[static_cast<Eigen::Index>(j)] < dist[static_cast<Eigen::Index>(*pick)]) {
        pick = j;
        pick_alpha = a;
      }
    }
    if (!pick) throw AdmissibleSuccessorNotFound(n, "no y in T(x_n) with alpha(x_n, y) >= 1");

    const double gap = dist[static_cast<Eigen::Index>(*pick)];
    report.majorant.push_back(phi(report.majorant.back()));
    if (exceeds_majorant(gap, report.majorant.back(), relative_slack)) {
      report.gap_majorant_ok = false;
      report.gap_majorant_failures.push_back(n);
    }
    report.gaps.push_back(gap);
    report.admissibility_trace.push_back(pick_alpha);
    report.orbit.push_back(image[*pick]);
  }

  report.certificate = cauchy_report(report.gaps, space.s(), CauchyCriterion::power(gamma), report.gaps.size() - 1);
  if (report.converged) {
    bool ok = true;
    for (std::size_t n = 0; n < report.orbit.size(); ++n)
      if (alpha(report.orbit[n], report.fixed_point) < 1.0) {
        ok = false;
        report.limit_admissibility_failures.push_back(n);
      }
    report.limit_admissible = ok;
  }
  return report;
}

template <class P>
struct PicardProbeEntry {
  P x{};
  P y{};
  bool valid = false;  ///< y in T(x)
  bool converged = false;
  std::optional<P> limit;
  std::size_t iterations = 0;
  std::string error;
};

template <class P>
struct WeaklyPicardReport {
  std::vector<PicardProbeEntry<P>> entries;
  std::size_t valid = 0;
  std::size_t converged = 0;
  /// converged / valid; 1 for a vacuous probe.
  double fraction = 1.0;
};

/// Runs multivalued_solve from every start pair; per-run errors are recorded, not rethrown.
template <class P>
WeaklyPicardReport<P> weakly_picard_probe(const BMetricSpace<P>& space, const MultiMap<P>& T,
                                          const AlphaFunction<P>& alpha, const ComparisonFunction& phi, double gamma,
                                          const std::vector<std::pair<P, P>>& start_pairs,
                                          const MultiSolveOptions& options = {}) {
  WeaklyPicardReport<P> out;
  for (const auto& [x, y] : start_pairs) {
    PicardProbeEntry<P> e;
    e.x = x;
    e.y = y;
    try {
      e.valid = contains(T(x), y);
      if (!e.valid) {
        e.error = "y is not in T(x)";
      } else {
        ++out.valid;
        const auto r = multivalued_solve(space, T, alpha, phi, gamma, x, y, options);
        e.iterations = r.iterations;
        e.converged = r.converged && is_fixed_point(space, T, r.fixed_point, options.tol);
        if (e.converged) {
          e.limit = r.fixed_point;
          ++out.converged;
        }
      }
    } catch (const Error& err) {
      e.error = err.what();
    }
    out.entries.push_back(std::move(e));
  }
  if (out.valid > 0) out.fraction = static_cast<double>(out.converged) / static_cast<double>(out.valid);
  return out;
}

/// Discrete system read from JSON:
/// {"points": [names], "images": {name: [names]}, "alpha": [[row], ...] (optional, defaults to 1)}.
struct FiniteMultiMap {
  std::vector<std::string> names;
  MultiMap<Label> map;
  AlphaFunction<Label> alpha;
};

FiniteMultiMap read_finite_multimap_json(std::istream& in);

}  // namespace bfix
