#pragma once

#include "bfix/errors.hpp"
#include "bfix/point.hpp"

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace bfix {

/// A distance on a point domain together with its relaxation constant s >= 1:
/// d(x,y) <= s (d(x,z) + d(z,y)).
///
/// Values are immutable after construction and the distance evaluator is
/// expected to be pure, so a space may be shared freely between threads.
template <class P>
class BMetricSpace {
 public:
  using Point = P;
  using DistanceFn = std::function<double(const P&, const P&)>;
  using Sampler = std::function<P(std::mt19937_64&)>;

  BMetricSpace(std::string label, double s, DistanceFn distance, Sampler sampler = {})
      : label_(std::move(label)), s_(s), distance_(std::move(distance)), sampler_(std::move(sampler)) {
    if (!std::isfinite(s_) || s_ < 1.0)
      throw ParameterError("relaxation constant s must be a finite real >= 1, got " + format_real(s_));
    if (!distance_) throw ParameterError("b-metric space '" + label_ + "' has no distance evaluator");
  }

  /// Checked distance: throws DistanceDomainError on a negative or non-finite value.
  double operator()(const P& x, const P& y) const {
    const double d = distance_(x, y);
    if (!std::isfinite(d) || d < 0.0)
      throw DistanceDomainError("distance in '" + label_ + "' evaluated to " + format_real(d) + " at (" +
                                format_point(x) + ", " + format_point(y) + ")");
    return d;
  }
  double distance(const P& x, const P& y) const { return (*this)(x, y); }

  double s() const noexcept { return s_; }
  const std::string& label() const noexcept { return label_; }

  bool has_sampler() const noexcept { return static_cast<bool>(sampler_); }
  P sample(std::mt19937_64& rng) const {
    if (!sampler_) throw PreconditionError("space '" + label_ + "' has no point sampler");
    return sampler_(rng);
  }

  /// Absolute tolerance for axiom i): coincident points must be within it, distinct ones beyond it.
  double zero_tolerance() const noexcept { return zero_tol_; }
  BMetricSpace with_zero_tolerance(double tol) const {
    BMetricSpace copy = *this;
    copy.zero_tol_ = tol;
    return copy;
  }

  /// Names of the points of a finite discrete space (empty otherwise).
  const std::vector<std::string>& point_names() const noexcept { return names_; }
  BMetricSpace with_point_names(std::vector<std::string> names) const {
    BMetricSpace copy = *this;
    copy.names_ = std::move(names);
    return copy;
  }

 private:
  std::string label_;
  double s_;
  DistanceFn distance_;
  Sampler sampler_;
  double zero_tol_ = 0.0;
  std::vector<std::string> names_;
};

enum class Axiom { Identity, Symmetry, RelaxedTriangle };
const char* to_string(Axiom axiom);

/// For RelaxedTriangle the witness is ordered (x, z, y) and lhs = d(x,y), rhs = s (d(x,z) + d(z,y)).
template <class P>
struct AxiomViolation {
  Axiom axiom;
  std::vector<P> witness;
  double lhs = 0.0;
  double rhs = 0.0;
};

/// `passed` means no counterexample was found on the checked sample.
template <class P>
struct AxiomReport {
  bool passed = true;
  std::vector<AxiomViolation<P>> violations;
  std::size_t pairs_checked = 0;
  std::size_t triples_checked = 0;
};

struct AxiomOptions {
  /// Relative slack on inequality iii), absorbing rounding at exact equality cases.
  double relative_slack = 1e-12;
};

/// Exhaustive check of the three axioms over all pairs and ordered triples of `sample`.
template <class P>
AxiomReport<P> verify_b_metric_axioms(const BMetricSpace<P>& space, const std::vector<P>& sample,
                                      const AxiomOptions& options = {}) {
  if (sample.empty()) throw PreconditionError("axiom verification needs a non-empty sample");
  const auto n = static_cast<Eigen::Index>(sample.size());
  Eigen::MatrixXd d(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) d(i, j) = space(sample[i], sample[j]);

  AxiomReport<P> report;
  const double tol = space.zero_tolerance();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      ++report.pairs_checked;
      const bool same = points_equal(sample[i], sample[j]);
      if (same ? d(i, j) > tol : d(i, j) <= tol)
        report.violations.push_back({Axiom::Identity, {sample[i], sample[j]}, d(i, j), tol});
      if (i < j && d(i, j) != d(j, i))
        report.violations.push_back({Axiom::Symmetry, {sample[i], sample[j]}, d(i, j), d(j, i)});
    }
  }
  const double s = space.s();
  for (Eigen::Index x = 0; x < n; ++x)
    for (Eigen::Index z = 0; z < n; ++z)
      for (Eigen::Index y = 0; y < n; ++y) {
        ++report.triples_checked;
        const double rhs = s * (d(x, z) + d(z, y));
        if (d(x, y) > rhs * (1.0 + options.relative_slack))
          report.violations.push_back({Axiom::RelaxedTriangle, {sample[x], sample[z], sample[y]}, d(x, y), rhs});
      }
  report.passed = report.violations.empty();
  return report;
}

/// Random-triple fuzzing of all three axioms; deterministic for a given seed.
template <class P>
AxiomReport<P> fuzz_b_metric_axioms(const BMetricSpace<P>& space, std::size_t triples, std::uint64_t seed,
                                    const AxiomOptions& options = {}) {
  std::mt19937_64 rng(seed);
  AxiomReport<P> report;
  const double s = space.s();
  const double tol = space.zero_tolerance();
  for (std::size_t t = 0; t < triples; ++t) {
    const P x = space.sample(rng);
    const P z = space.sample(rng);
    const P y = space.sample(rng);
    const double dxy = space(x, y), dyx = space(y, x), dxz = space(x, z), dzy = space(z, y);
    const double dxx = space(x, x);
    report.pairs_checked += 2;
    ++report.triples_checked;
    if (dxx > tol) report.violations.push_back({Axiom::Identity, {x, x}, dxx, tol});
    if (!points_equal(x, y) && dxy <= tol) report.violations.push_back({Axiom::Identity, {x, y}, dxy, tol});
    if (dxy != dyx) report.violations.push_back({Axiom::Symmetry, {x, y}, dxy, dyx});
    const double rhs = s * (dxz + dzy);
    if (dxy > rhs * (1.0 + options.relative_slack))
      report.violations.push_back({Axiom::RelaxedTriangle, {x, z, y}, dxy, rhs});
  }
  report.passed = report.violations.empty();
  return report;
}

// Builtin spaces.

/// d(x,y) = |x-y|^q on the real line, s = 2^(q-1). Requires q >= 1.
BMetricSpace<double> snowflake(double q);

/// The usual metric |x-y| (snowflake(1)).
BMetricSpace<double> real_line();

/// d(x,y) = (sum_i |x_i - y_i|^p)^(1/p) on R^dim, s = 2^(1/p - 1). Requires p in (0,1], dim >= 1.
BMetricSpace<Vector> lp_quasinorm(double p, int dim);

/// Finite space given by a distance table. The table must be square, symmetric, non-negative,
/// zero exactly on the diagonal, and satisfy the relaxed triangle inequality with `s`.
BMetricSpace<Label> discrete_matrix(const Eigen::MatrixXd& table, double s, std::vector<std::string> names = {});

/// n points at mutual distance 1 (the discrete metric, s = 1).
BMetricSpace<Label> discrete_metric(std::size_t n);

/// Parses a header row of point labels followed by a square matrix of non-negative reals.
BMetricSpace<Label> read_discrete_matrix_csv(std::istream& in, double s);

/// Loads `path` and the relaxation constant from its sidecar file (same stem, extension `.s`).
BMetricSpace<Label> load_discrete_matrix_csv(const std::filesystem::path& path);
std::filesystem::path sidecar_path(const std::filesystem::path& csv_path);

void write_discrete_matrix_csv(std::ostream& out, const Eigen::MatrixXd& table, const std::vector<std::string>& names);

// Hausdorff-Pompeiu distance.

/// Matrix of d(a_i, b_j).
template <class P>
Eigen::MatrixXd distance_matrix(const std::vector<P>& A, const std::vector<P>& B, const BMetricSpace<P>& space) {
  Eigen::MatrixXd D(static_cast<Eigen::Index>(A.size()), static_cast<Eigen::Index>(B.size()));
  for (Eigen::Index i = 0; i < D.rows(); ++i)
    for (Eigen::Index j = 0; j < D.cols(); ++j) D(i, j) = space(A[i], B[j]);
  return D;
}

/// max over a in A of min over b in B of d(a,b).
template <class P>
double directed_hausdorff(const std::vector<P>& A, const std::vector<P>& B, const BMetricSpace<P>& space) {
  if (A.empty() || B.empty()) throw EmptySetError("Hausdorff distance of an empty set");
  return distance_matrix(A, B, space).rowwise().minCoeff().maxCoeff();
}

template <class P>
double hausdorff_distance(const std::vector<P>& A, const std::vector<P>& B, const BMetricSpace<P>& space) {
  if (A.empty() || B.empty()) throw EmptySetError("Hausdorff distance of an empty set");
  const Eigen::MatrixXd D = distance_matrix(A, B, space);
  return std::max(D.rowwise().minCoeff().maxCoeff(), D.colwise().minCoeff().maxCoeff());
}

/// min over b in B of d(x,b).
template <class P>
double point_set_distance(const P& x, const std::vector<P>& B, const BMetricSpace<P>& space) {
  if (B.empty()) throw EmptySetError("distance to an empty set");
  double best = space(x, B.front());
  for (std::size_t j = 1; j < B.size(); ++j) best = std::min(best, space(x, B[j]));
  return best;
}

}  // namespace bfix
