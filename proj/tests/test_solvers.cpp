#include "bfix/json_io.hpp"
#include "bfix/solvers.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace bfix;

namespace {

SelfMap<double> scale(double c) {
  return {[c](const double& x) { return c * x; }, "scale"};
}

CaristiData<double> abs_potential(double c, double alpha) {
  return {[c](const double& x) { return c * std::abs(x); }, alpha};
}

/// s M sum_{i=n}^{255} i^gamma phi^[i](d0), recomputed without the library.
double reference_bound(double c, double gamma, double s, double d0, std::size_t n) {
  double sum = 0.0, m = d0;
  for (std::size_t i = 0; i < 256; ++i) {
    if (i >= n) sum += std::pow(double(i), gamma) * m;
    m *= c;
  }
  return s * oracle::M_reference(s, gamma) * sum;
}

}  // namespace

TEST(Caristi, HalvingMapHoldsWithEquality) {
  const auto r = caristi_solve(real_line(), scale(0.5), abs_potential(2.0, 1.5), 1.0);
  EXPECT_TRUE(r.converged);
  EXPECT_TRUE(r.hypothesis_violations.empty());
  EXPECT_LT(std::abs(r.fixed_point), 1e-12);
  EXPECT_LE(r.residual, 1e-12);
  // 0.5|x| = 2|x| - 1.5 (2 |x/2|) along the orbit.
  for (std::size_t n = 0; n + 1 < r.orbit.size(); ++n) {
    const double x = r.orbit[n];
    EXPECT_NEAR(r.gaps[n], 2 * std::abs(x) - 1.5 * 2 * std::abs(x / 2), 1e-15);
  }
  const double budget = 1.5 * 2.0 * std::abs(r.orbit[1]);
  for (double w : r.weighted_partial_sums) EXPECT_LE(w, budget * (1 + 1e-12));
}

TEST(Caristi, AlreadyFixed) {
  const auto r = caristi_solve(real_line(), scale(0.5), abs_potential(2.0, 1.5), 0.0);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.iterations, 0u);
  EXPECT_EQ(r.fixed_point, 0.0);
}

TEST(Caristi, ShiftViolatesTheCondition) {
  const SelfMap<double> shift{[](const double& x) { return x + 1; }, "shift"};
  const CaristiData<double> zero{[](const double&) { return 0.0; }, 2.0};
  const auto r = caristi_solve(real_line(), shift, zero, 0.0, {1e-12, 5});
  EXPECT_FALSE(r.converged);
  ASSERT_FALSE(r.hypothesis_violations.empty());
  EXPECT_EQ(r.hypothesis_violations.front().kind, "caristi_condition");
  EXPECT_EQ(r.hypothesis_violations.front().step, 0u);
  EXPECT_EQ(r.hypothesis_violations.front().lhs, 1.0);
  EXPECT_EQ(r.hypothesis_violations.front().rhs, 0.0);
  EXPECT_THROW(caristi_solve(real_line(), shift, CaristiData<double>{zero.potential, 1.0}, 0.0), PreconditionError);
}

TEST(Caristi, BudgetHoldsOnRandomContractions) {
  // f(x) = c x with potential k|x| satisfies the condition when (1-c) <= k - alpha k c.
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> c_dist(0.05, 0.6), x_dist(-10, 10);
  for (int trial = 0; trial < 200; ++trial) {
    const double c = c_dist(rng), alpha = 1.5;
    const double k = (1 - c) / (1 - alpha * c) * 1.01;
    if (!(1 - alpha * c > 0)) continue;
    const auto r = caristi_solve(real_line(), scale(c), abs_potential(k, alpha), x_dist(rng));
    ASSERT_TRUE(r.converged) << c;
    if (r.orbit.size() < 2) continue;
    const double budget = alpha * k * std::abs(r.orbit[1]);
    for (double w : r.weighted_partial_sums) EXPECT_LE(w, budget * (1 + 1e-12));
  }
}

TEST(BoydWong, SnowflakeHalvingBoundDominatesTrueError) {
  const auto r = boyd_wong_solve(snowflake(2), scale(0.5), linear(0.25), 2.0, 1.0);
  EXPECT_TRUE(r.converged);
  EXPECT_LE(r.iterations, 60u);
  EXPECT_LT(r.residual, 1e-9);
  ASSERT_EQ(r.error_bound_history.size(), r.iterations);
  for (std::size_t n = 1; n <= r.iterations; ++n) {
    const double truth = std::pow(std::pow(2.0, -double(n)), 2.0);
    EXPECT_GE(r.error_bound_history[n - 1], truth) << n;
  }
}

TEST(BoydWong, SinglePointSpace) {
  const SelfMap<Label> id{[](const Label& x) { return x; }, "identity"};
  const auto r = boyd_wong_solve(discrete_metric(1), id, linear(0.5), 1.0, Label{0});
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.iterations, 0u);
  EXPECT_EQ(r.fixed_point, Label{0});
}

TEST(BoydWong, DoublingGivesContractionWitness) {
  const auto r = boyd_wong_solve(snowflake(2), scale(2.0), linear(0.25), 2.0, 1.0, {1e-9, 5});
  EXPECT_FALSE(r.converged);
  ASSERT_FALSE(r.hypothesis_violations.empty());
  EXPECT_EQ(r.hypothesis_violations.front().kind, "contraction");
  EXPECT_EQ(r.hypothesis_violations.front().step, 1u);

  const std::vector<std::pair<double, double>> pairs{{0.0, 1.0}};
  const auto sampled = boyd_wong_solve(snowflake(2), scale(2.0), linear(0.25), 2.0, 1.0, {1e-9, 5},
                                       std::span<const std::pair<double, double>>(pairs));
  EXPECT_EQ(sampled.hypothesis_violations.front().step, 0u);
  EXPECT_EQ(sampled.hypothesis_violations.front().lhs, 4.0);
  EXPECT_EQ(sampled.hypothesis_violations.front().rhs, 0.25);
  EXPECT_THROW(boyd_wong_solve(snowflake(2), scale(0.5), linear(0.25), 1.0, 1.0), PreconditionError);
}

TEST(BoydWong, BoundSoundAcrossTestMatrix) {
  std::size_t violations = 0, checked = 0;
  auto audit = [&](const auto& report, auto dist_to_fixed) {
    ASSERT_TRUE(report.converged);
    for (std::size_t n = 1; n <= report.iterations; ++n, ++checked)
      if (dist_to_fixed(report.orbit[n]) > report.error_bound_history[n - 1]) ++violations;
  };
  const auto sf = snowflake(2);
  for (double x0 : {-3.0, 0.5, 7.0, 100.0})
    audit(boyd_wong_solve(sf, scale(0.5), linear(0.25), 2.0, x0), [&](double x) { return sf(x, 0.0); });

  const auto line = real_line();
  // phi(t) = t/3 would be tight; rounding near the fixed point then shows up as violations.
  const SelfMap<double> affine{[](const double& x) { return x / 3 + 1; }, "affine"};
  for (double x0 : {-10.0, 0.0, 4.0})
    audit(boyd_wong_solve(line, affine, linear(0.34), 1.0, x0), [&](double x) { return line(x, 1.5); });

  const auto lp = lp_quasinorm(0.5, 2);
  const SelfMap<Vector> half{[](const Vector& v) -> Vector { return v / 2; }, "half"};
  Vector start(2);
  start << 3, -1;
  audit(boyd_wong_solve(lp, half, linear(0.5), 2.0, start), [&](const Vector& v) { return lp(v, Vector::Zero(2)); });

  const auto sf3 = snowflake(3);
  for (double x0 : {2.0, -0.7})
    audit(boyd_wong_solve(sf3, scale(0.6), linear(0.6 * 0.6 * 0.6), 2.5, x0), [&](double x) { return sf3(x, 0.0); });

  EXPECT_GT(checked, 100u);
  EXPECT_EQ(violations, 0u);
}

TEST(BoydWong, GapMajorantOnCleanRuns) {
  const auto r = boyd_wong_solve(snowflake(2), scale(0.5), linear(0.25), 2.0, 5.0);
  ASSERT_TRUE(r.hypothesis_violations.empty());
  for (std::size_t n = 0; n < r.gaps.size(); ++n)
    EXPECT_LE(r.gaps[n], iterate(linear(0.25), n, r.gaps[0]) * (1 + 1e-9));
}

TEST(Apriori, MatchesLongReferenceSum) {
  const auto b = apriori_error(linear(0.25), 2.0, 2.0, 1.0, 10, 60);
  EXPECT_FALSE(b.truncated);
  EXPECT_NEAR(b.value, reference_bound(0.25, 2.0, 2.0, 1.0, 10), 1e-10 * b.value);
  EXPECT_NEAR(2.0 * big_M(2.0, 2.0), 38.05, 0.01);
  EXPECT_EQ(apriori_error(linear(0.25), 2.0, 2.0, 0.0, 10, 60).value, 0.0);
  EXPECT_THROW(apriori_error(linear(0.25), 1.0, 2.0, 1.0, 10, 60), PreconditionError);
  EXPECT_THROW(apriori_error(linear(0.25), 2.0, 2.0, 1.0, 0, 60), PreconditionError);
}

TEST(Apriori, MonotoneInN) {
  for (double c : {0.1, 0.25, 0.5}) {
    double prev = INFINITY;
    for (std::size_t n = 1; n <= 40; ++n) {
      const double v = apriori_error(linear(c), 2.0, 2.0, 1.0, n, 80).value;
      EXPECT_LE(v, prev) << c << " " << n;
      prev = v;
    }
  }
}

TEST(Apriori, SlowDecayIsFlaggedTruncated) {
  const auto b = apriori_error(example_phi(), 1.5, 2.0, 0.1, 1, 200);
  EXPECT_TRUE(b.truncated);
  EXPECT_GT(b.ratio, 0.95);
}

TEST(Uniqueness, Examples) {
  const auto sf = snowflake(2);
  const auto three = uniqueness_probe(sf, scale(0.5), linear(0.25), 2.0, {-3.0, 0.5, 7.0});
  EXPECT_TRUE(three.unique);
  EXPECT_FALSE(three.inconclusive);
  EXPECT_LE(three.distances.maxCoeff(), 1e-8);
  for (const auto& r : three.runs) EXPECT_LT(std::abs(r.fixed_point), 1e-4);

  const auto single = uniqueness_probe(sf, scale(0.5), linear(0.25), 2.0, {4.0});
  EXPECT_TRUE(single.unique);

  const SelfMap<double> id{[](const double& x) { return x; }, "identity"};
  const auto idr = uniqueness_probe(sf, id, linear(0.25), 2.0, {1.0, 2.0});
  EXPECT_TRUE(idr.inconclusive);
  EXPECT_FALSE(idr.unique);
  EXPECT_FALSE(idr.violations.empty());
}

TEST(SolveReportJson, CarriesTheDocumentedKeys) {
  const auto r = boyd_wong_solve(snowflake(2), scale(0.5), linear(0.25), 2.0, 1.0);
  const auto j = to_json(r);
  for (const char* key : {"fixed_point", "iterations", "residual", "bounds", "violations", "converged", "assumptions"})
    EXPECT_TRUE(j.contains(key)) << key;
  EXPECT_EQ(j["bounds"].size(), r.iterations);
  EXPECT_EQ(j["converged"], true);

  const SelfMap<double> shift{[](const double& x) { return x + 1; }, "shift"};
  const CaristiData<double> zero{[](const double&) { return 0.0; }, 2.0};
  const auto bad = to_json(caristi_solve(real_line(), shift, zero, 0.0, {1e-12, 2}));
  EXPECT_EQ(bad["violations"][0]["kind"], "caristi_condition");
}
