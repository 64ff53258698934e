#pragma once

#include "bfix/bmetric.hpp"
#include "bfix/cauchy.hpp"
#include "bfix/comparison.hpp"

#include <Eigen/Core>

#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace bfix {

template <class P>
struct SelfMap {
  std::function<P(const P&)> apply;
  std::string label;

  P operator()(const P& x) const { return apply(x); }
};

/// Potential phi >= 0 and factor alpha > 1 of the Caristi condition d(x, f(x)) <= phi(x) - alpha phi(f(x)).
template <class P>
struct CaristiData {
  std::function<double(const P&)> potential;
  double alpha = 2.0;
};

struct HypothesisViolation {
  std::string kind;  ///< "caristi_condition", "caristi_budget", "negative_potential", "contraction", "gap_majorant"
  std::size_t step = 0;
  double lhs = 0.0;
  double rhs = 0.0;
};

template <class P>
struct SolveReport {
  std::string method;
  P fixed_point{};
  std::size_t iterations = 0;
  double residual = 0.0;  ///< d(x*, f(x*))
  /// Boyd-Wong: a-priori bound on d(x_n, u) for n = 1..iterations.
  /// Caristi: remaining potential phi(x_n) for n = 0..iterations.
  std::vector<double> error_bound_history;
  bool bound_truncated = false;
  std::vector<HypothesisViolation> hypothesis_violations;
  bool converged = false;
  std::vector<std::string> assumptions;
  std::vector<P> orbit;        ///< x_0 .. x_{iterations}
  std::vector<double> gaps;    ///< d(x_n, x_{n+1}), one past the orbit's last point
  /// Caristi: partial sums of sum_{k>=1} alpha^k d(x_k, x_{k+1}).
  std::vector<double> weighted_partial_sums;
};

struct AprioriBound {
  double value = 0.0;
  bool truncated = false;
  double ratio = 0.0;  ///< empirical ratio q used for the tail extrapolation
};

struct AprioriOptions {
  /// Tail extrapolation is applied only when q <= max_ratio; otherwise the bound is the
  /// finite sum and flagged truncated.
  double max_ratio = 0.95;
};

/// s M (sum_{i=n}^{H} i^gamma m_i + tail), with m_i = phi^[i](d0) supplied as `majorant`
/// (indices 0..H). The tail extrapolates the last terms geometrically with
/// q = sup of t_{i+1}/t_i over i in [max(n, H/10), H), t_i = i^gamma m_i.
AprioriBound apriori_error_from_majorant(std::span<const double> majorant, double gamma, double s, std::size_t n,
                                         const AprioriOptions& options = {});

/// Bound on d(x_n, u) for a phi-contraction with d0 = d(x_0, x_1).
AprioriBound apriori_error(const ComparisonFunction& phi, double gamma, double s, double d0, std::size_t n,
                           std::size_t horizon, const AprioriOptions& options = {});

struct CaristiOptions {
  double tol = 1e-12;
  std::size_t max_iter = 10000;
};

/// Picard iteration with the Caristi condition checked at every step. Stops once both
/// d(x_n, x_{n+1}) and phi(x_n) are <= tol. Violations are recorded, not thrown.
template <class P>
SolveReport<P> caristi_solve(const BMetricSpace<P>& space, const SelfMap<P>& f, const CaristiData<P>& data,
                             const P& x0, const CaristiOptions& options = {}) {
  if (!(data.alpha > 1.0)) throw PreconditionError("Caristi factor alpha must be > 1");
  SolveReport<P> report;
  report.method = "caristi";
  report.assumptions = {"f is continuous (not checked)", "the space is complete (not checked)",
                        "bounds hold the remaining potential phi(x_n)"};
  P x = x0;
  report.orbit.push_back(x);
  double potential_x1 = 0.0;
  double weighted = 0.0;
  bool stopped = false;
  for (std::size_t n = 0;; ++n) {
    const P fx = f(x);
    const double gap = space(x, fx);
    const double px = data.potential(x);
    const double pfx = data.potential(fx);
    for (double p : {px, pfx})
      if (!(p >= 0.0) || !std::isfinite(p)) report.hypothesis_violations.push_back({"negative_potential", n, p, 0.0});
    report.error_bound_history.push_back(px);
    report.gaps.push_back(gap);

    if (gap <= options.tol && px <= options.tol) {
      report.fixed_point = x;
      report.iterations = n;
      report.residual = gap;
      stopped = true;
      break;
    }
    if (n == options.max_iter) {
      report.fixed_point = x;
      report.iterations = n;
      report.residual = gap;
      break;
    }
    const double rhs = px - data.alpha * pfx;
    if (gap > rhs + 1e-12 * std::abs(px)) report.hypothesis_violations.push_back({"caristi_condition", n, gap, rhs});
    if (n == 1) potential_x1 = px;
    if (n >= 1) {
      weighted += std::pow(data.alpha, static_cast<double>(n)) * gap;
      report.weighted_partial_sums.push_back(weighted);
      const double budget = data.alpha * potential_x1;
      if (weighted > budget * (1.0 + 1e-12)) report.hypothesis_violations.push_back({"caristi_budget", n, weighted, budget});
    }
    x = fx;
    report.orbit.push_back(x);
  }
  report.converged = stopped && report.hypothesis_violations.empty();
  return report;
}

struct BoydWongOptions {
  double eps = 1e-9;
  std::size_t max_iter = 1000;
  /// Majorant terms summed beyond the current index before extrapolating the tail.
  std::size_t horizon_extra = 200;
  AprioriOptions apriori;
};

/// Picard iteration for a phi-contraction, stopped when the a-priori bound on d(x_n, u) drops
/// below eps. The contraction inequality is checked along the orbit and on `pair_sample`.
template <class P>
SolveReport<P> boyd_wong_solve(const BMetricSpace<P>& space, const SelfMap<P>& f, const ComparisonFunction& phi,
                               double gamma, const P& x0, const BoydWongOptions& options = {},
                               std::span<const std::pair<P, P>> pair_sample = {}) {
  require_gamma_above_log2s(space.s(), gamma);
  SolveReport<P> report;
  report.method = "boyd-wong";
  report.assumptions = {"the space is complete (not checked)",
                        "phi-contraction checked along the orbit and on the supplied pairs only",
                        "phi in Gamma^gamma assumed (not enforced)"};
  for (std::size_t i = 0; i < pair_sample.size(); ++i) {
    const auto& [x, y] = pair_sample[i];
    const double lhs = space(f(x), f(y));
    const double rhs = phi(space(x, y));
    if (lhs > rhs * (1.0 + 1e-12)) report.hypothesis_violations.push_back({"contraction", i, lhs, rhs});
  }

  P x = x0;
  P fx = f(x);
  const double d0 = space(x, fx);
  report.orbit.push_back(x);
  report.gaps.push_back(d0);
  if (d0 == 0.0) {
    report.fixed_point = x;
    report.converged = report.hypothesis_violations.empty();
    return report;
  }

  std::vector<double> majorant{d0};  // phi^[i](d0)
  auto extend_majorant = [&](std::size_t upto) {
    while (majorant.size() <= upto) majorant.push_back(phi(majorant.back()));
  };

  bool stopped = false;
  for (std::size_t n = 1; n <= options.max_iter; ++n) {
    x = std::move(fx);
    fx = f(x);
    report.orbit.push_back(x);
    const double gap = space(x, fx);
    const double prev = report.gaps.back();
    report.gaps.push_back(gap);

    const double contracted = phi(prev);
    if (gap > contracted * (1.0 + 1e-12)) report.hypothesis_violations.push_back({"contraction", n, gap, contracted});
    extend_majorant(n + options.horizon_extra);
    if (exceeds_majorant(gap, majorant[n], 1e-9)) report.hypothesis_violations.push_back({"gap_majorant", n, gap, majorant[n]});

    const auto bound = apriori_error_from_majorant(
        std::span<const double>(majorant).first(n + options.horizon_extra + 1), gamma, space.s(), n, options.apriori);
    report.error_bound_history.push_back(bound.value);
    report.bound_truncated = bound.truncated;
    report.iterations = n;
    report.fixed_point = x;
    report.residual = gap;
    if (!bound.truncated && bound.value < options.eps) {
      stopped = true;
      break;
    }
  }
  report.converged = stopped && report.hypothesis_violations.empty() && report.residual <= options.eps;
  return report;
}

template <class P>
struct UniquenessReport {
  bool unique = false;
  bool inconclusive = false;
  double threshold = 0.0;
  Eigen::MatrixXd distances;  ///< pairwise distances between the computed limits
  std::vector<SolveReport<P>> runs;
  std::vector<HypothesisViolation> violations;  ///< contraction failures on seed pairs
};

/// Solves from every seed and compares the limits pairwise against max(10 eps, 1e-8).
template <class P>
UniquenessReport<P> uniqueness_probe(const BMetricSpace<P>& space, const SelfMap<P>& f, const ComparisonFunction& phi,
                                     double gamma, const std::vector<P>& seeds, const BoydWongOptions& options = {}) {
  UniquenessReport<P> out;
  out.threshold = std::max(10.0 * options.eps, 1e-8);
  for (std::size_t i = 0; i < seeds.size(); ++i)
    for (std::size_t j = i + 1; j < seeds.size(); ++j) {
      const double lhs = space(f(seeds[i]), f(seeds[j]));
      const double rhs = phi(space(seeds[i], seeds[j]));
      if (lhs > rhs * (1.0 + 1e-12)) out.violations.push_back({"contraction", i * seeds.size() + j, lhs, rhs});
    }
  for (const auto& seed : seeds) out.runs.push_back(boyd_wong_solve(space, f, phi, gamma, seed, options));

  const auto k = static_cast<Eigen::Index>(seeds.size());
  out.distances = Eigen::MatrixXd::Zero(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j)
      out.distances(i, j) = space(out.runs[i].fixed_point, out.runs[j].fixed_point);

  bool all_converged = true;
  for (const auto& r : out.runs) all_converged = all_converged && r.converged;
  out.inconclusive = !all_converged || !out.violations.empty();
  out.unique = !out.inconclusive && (k == 0 || out.distances.maxCoeff() <= out.threshold);
  return out;
}

}  // namespace bfix
