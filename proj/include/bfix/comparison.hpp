#pragma once

#include "bfix/series.hpp"

#include <boost/rational.hpp>

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bfix {

/// A monotone self-map of [0, inf) used as a contraction gauge.
struct ComparisonFunction {
  std::function<double(double)> eval;
  std::string label;

  /// Checked evaluation: DomainError for r < 0, RangeError for a negative or non-finite value.
  double operator()(double r) const;
};

/// n-fold composition phi^[n](r); phi^[0] is the identity.
double iterate(const ComparisonFunction& phi, std::size_t n, double r);

/// phi^[0](r), ..., phi^[n_max](r).
std::vector<double> iterates(const ComparisonFunction& phi, double r, std::size_t n_max);

/// x - x^(4/3) on [0, 27/64], the constant 27/256 beyond.
ComparisonFunction example_phi();

using Rational = boost::rational<std::int64_t>;

/// Exact evaluation of example_phi at a rational point. Returns nullopt when the
/// value is irrational (x <= 27/64 without a rational cube root).
std::optional<Rational> example_phi_exact(Rational x);

/// phi(t) = c t.
ComparisonFunction linear(double c);

/// phi(x) = x - a x^alpha up to the peak (a alpha)^(-1/(alpha-1)), constant afterwards.
/// example_phi() is quadratic_gap(1, 4/3) with an exact branch point.
ComparisonFunction quadratic_gap(double a, double alpha);

/// Builds a function from its registry name: "example_phi", "linear(c)", "quadratic_gap(a,alpha)".
/// Arguments may be decimals or fractions ("1/4").
ComparisonFunction make_comparison_function(const std::string& spec);
std::vector<std::string> comparison_function_names();

// Class-membership evidence.

struct ClassClaim {
  enum class Kind { Comparison, GammaGamma, GammaAlpha, PsiB };
  Kind kind = Kind::Comparison;
  double gamma = 0.0;
  double alpha = 0.0;
  double a = 0.0;
  double eps = 0.0;
  double b = 0.0;

  static ClassClaim comparison() { return {}; }
  static ClassClaim gamma_gamma(double gamma) { return {Kind::GammaGamma, gamma}; }
  static ClassClaim gamma_alpha(double alpha, double a, double eps) { return {Kind::GammaAlpha, 0.0, alpha, a, eps}; }
  static ClassClaim psi_b(double b) { return {Kind::PsiB, 0.0, 0.0, 0.0, 0.0, b}; }
  std::string describe() const;
};

struct Witness {
  std::string what;
  double point = 0.0;
  std::size_t index = 0;
  double lhs = 0.0;
  double rhs = 0.0;
};

struct ClassEvidence {
  ClassClaim claim;
  Verdict verdict = Verdict::Inconclusive;
  std::size_t horizon = 0;
  std::vector<double> partial_sums;
  std::optional<SeriesEvidence> series;
  std::optional<Witness> witness;
  std::string note;
};

/// Monotonicity on the (sorted, non-negative) grid, phi(r) < r for r > 0, and
/// phi^[horizon](r) < tol for every grid point.
ClassEvidence check_comparison_axioms(const ComparisonFunction& phi, std::span<const double> r_grid,
                                      std::size_t horizon, double tol);

/// Partial sums of sum_{n>=1} n^gamma phi^[n](r) up to `horizon`, classified by `criterion`.
ClassEvidence gamma_summability_report(const ComparisonFunction& phi, double gamma, double r, std::size_t horizon,
                                       const SeriesCriterion& criterion = {});

/// phi(x) <= x - a x^alpha at `grid_size` uniformly spaced points of [0, eps].
ClassEvidence gamma_alpha_check(const ComparisonFunction& phi, double alpha, double a, double eps,
                                std::size_t grid_size);

struct AsymptoticSample {
  std::size_t n = 0;
  double x = 0.0;
  double scaled = 0.0;  ///< x_n n^(1/(alpha-1))
};

struct AsymptoticReport {
  double a = 0.0;
  double alpha = 0.0;
  double x0 = 0.0;
  std::vector<AsymptoticSample> samples;
  double target = 0.0;  ///< (1/(a(alpha-1)))^(1/(alpha-1))
  double final_relative_error = 0.0;

  double relative_error(const AsymptoticSample& s) const;
};

/// Largest x with x - a x^alpha >= 0 on [0, x].
double gap_recursion_limit(double a, double alpha);

/// Runs x_{n+1} = x_n - a x_n^alpha and records the scaled iterate at each checkpoint.
AsymptoticReport lemma41_orbit(double a, double alpha, double x0, std::size_t n_max,
                               std::vector<std::size_t> checkpoints);

/// Smallest b_n admissible at r0 in b^{n+1} phi^[n+1](r0) <= a b^n phi^[n](r0) + b_n.
double psi_b_min_bn(const ComparisonFunction& phi, double a, double b, double r0, std::size_t n);

/// psi_b_min_bn for n = 0..n_max in one orbit pass.
std::vector<double> psi_b_min_bn_sequence(const ComparisonFunction& phi, double a, double b, double r0,
                                          std::size_t n_max);

struct MajorizationMode {
  enum class Kind { ConstantA, Power };
  Kind kind = Kind::ConstantA;
  double value = 0.0;  ///< a for ConstantA, eps for Power

  static MajorizationMode constant_a(double a) { return {Kind::ConstantA, a}; }
  static MajorizationMode power(double eps) { return {Kind::Power, eps}; }
  /// a_n; the power mode uses ((n-1)/n)^(eps+1+gamma) with 0^x = 0.
  double coefficient(std::size_t n, double gamma) const;
};

/// Checks phi^[n+1](r) <= a_n phi^[n](r) + b_n up to `horizon`, then the series
/// sum n^gamma b_n (constant mode) or sum b_n n^(eps+1+gamma) (power mode).
/// A premise violation is evidence-against; a non-convergent series leaves the
/// sufficient condition unmet and the verdict inconclusive.
ClassEvidence majorization_check(const ComparisonFunction& phi, const MajorizationMode& mode,
                                 std::span<const double> b_seq, double gamma, double r, std::size_t horizon,
                                 const SeriesCriterion& criterion = {});

/// Verifies the Berinde inequality with the supplied (b_n), then reduces to the constant
/// mode of majorization_check with a/b and b_n / b^{n+1}. ParameterError if (b_n) is not summable.
ClassEvidence psi_b_membership_via_prop44(const ComparisonFunction& phi, double a, double b,
                                          std::span<const double> b_seq, double gamma, double r,
                                          std::size_t horizon, const SeriesCriterion& criterion = {});

}  // namespace bfix
