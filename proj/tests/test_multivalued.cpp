#include "bfix/multivalued.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

using namespace bfix;

namespace {

MultiMap<double> half_third() {
  return {[](const double& x) { return std::vector<double>{x / 2, x / 3}; }, "half_third"};
}

MultiMap<double> singleton(double c) {
  return {[c](const double& x) { return std::vector<double>{c * x}; }, "singleton"};
}

const auto one = AlphaFunction<double>::constant(1.0);

std::vector<std::pair<double, double>> random_pairs(std::uint64_t seed, std::size_t n) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i < n; ++i) out.emplace_back(u(rng), u(rng));
  return out;
}

}  // namespace

TEST(AlphaStar, Examples) {
  EXPECT_EQ(alpha_star<double>({1.0, 5.0}, {-2.0}, one), 1.0);
  const AlphaFunction<double> sum{[](const double& u, const double& v) { return u + v; }, "sum"};
  EXPECT_EQ(alpha_star<double>({0.0, 1.0}, {2.0}, sum), 2.0);
  EXPECT_THROW(alpha_star<double>({}, {2.0}, sum), EmptySetError);
  EXPECT_THROW(alpha_star<double>({1.0}, {}, sum), EmptySetError);
  EXPECT_THROW(alpha_star<double>({-3.0}, {1.0}, sum), RangeError);
  EXPECT_THROW(AlphaFunction<double>::constant(-1.0), ParameterError);
}

TEST(AlphaStar, IsTheInfimumOverTheProduct) {
  std::mt19937_64 rng(41);
  std::uniform_int_distribution<std::size_t> size(1, 8);
  const AlphaFunction<double> prod{[](const double& u, const double& v) { return std::abs(u * v) + 0.1; }, "prod"};
  for (int trial = 0; trial < 500; ++trial) {
    const auto A = oracle::random_reals(rng, size(rng), -3, 3);
    const auto B = oracle::random_reals(rng, size(rng), -3, 3);
    const double a = alpha_star(A, B, prod);
    bool attained = false;
    for (double u : A)
      for (double v : B) {
        EXPECT_LE(a, prod(u, v));
        attained = attained || a == prod(u, v);
      }
    EXPECT_TRUE(attained);
  }
}

TEST(MultiMap, EmptyImageIsAnError) {
  const MultiMap<double> empty{[](const double&) { return std::vector<double>{}; }, "empty"};
  EXPECT_THROW(empty(1.0), EmptySetError);
}

TEST(CertifyHypotheses, Examples) {
  const auto pairs = random_pairs(1, 1000);
  const auto line = certify_hypotheses(real_line(), singleton(0.5), one, linear(0.5), pairs);
  EXPECT_TRUE(line.passed);
  EXPECT_EQ(line.pairs_checked, 1000u);

  EXPECT_TRUE(certify_hypotheses(snowflake(2), singleton(0.5), one, linear(0.25), pairs).passed);
  EXPECT_TRUE(certify_hypotheses(snowflake(2), half_third(), one, linear(0.25), pairs).passed);

  const auto bad = certify_hypotheses(real_line(), singleton(2.0), one, linear(0.5), {{0.0, 1.0}});
  EXPECT_FALSE(bad.passed);
  ASSERT_EQ(bad.witnesses.size(), 1u);
  EXPECT_EQ(bad.witnesses[0].kind, "contractivity");
  EXPECT_EQ(bad.witnesses[0].lhs, 2.0);
  EXPECT_EQ(bad.witnesses[0].rhs, 0.5);
}

TEST(CertifyHypotheses, AdmissibilityWitness) {
  // alpha(x, y) = 1 when both are >= 0, 0 otherwise; T(x) = {-x} breaks admissibility.
  const AlphaFunction<double> sign{[](const double& x, const double& y) { return x >= 0 && y >= 0 ? 1.0 : 0.0; },
                                   "sign"};
  const auto cert = certify_hypotheses(real_line(), singleton(-0.5), sign, linear(0.5), {{1.0, 2.0}});
  ASSERT_FALSE(cert.passed);
  EXPECT_EQ(cert.witnesses[0].kind, "admissibility");
  EXPECT_EQ(cert.witnesses[0].lhs, 0.0);
}

TEST(MultivaluedSolve, HalfThirdConvergesToZero) {
  const auto r = multivalued_solve(snowflake(2), half_third(), one, linear(0.25), 2.0, 1.0, 0.5);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.fixed_point, 0.0);
  EXPECT_EQ(r.residual, 0.0);
  EXPECT_TRUE(r.gap_majorant_ok);
  EXPECT_TRUE(r.gap_majorant_failures.empty());
  ASSERT_TRUE(r.limit_admissible.has_value());
  EXPECT_TRUE(*r.limit_admissible);
  ASSERT_TRUE(r.certificate.has_value());
  EXPECT_EQ(r.certificate->verdict, CauchyVerdict::Certified);
  EXPECT_TRUE(is_fixed_point(snowflake(2), half_third(), r.fixed_point, 0.0));
  // Nearest successor of x is x/2 for x > 0 in the snowflake metric: (x/2)^2 < (2x/3)^2.
  EXPECT_EQ(r.orbit[2], 0.25);
  for (std::size_t n = 0; n < r.gaps.size(); ++n) {
    EXPECT_LE(r.gaps[n], r.majorant[n] * (1 + 1e-9)) << n;
    EXPECT_GE(r.admissibility_trace[n], 1.0);
  }
}

TEST(MultivaluedSolve, AlreadyFixed) {
  const MultiMap<double> with_self{[](const double& x) { return std::vector<double>{x / 2, x}; }, "with_self"};
  const auto r = multivalued_solve(snowflake(2), with_self, one, linear(0.25), 2.0, 3.0, 1.5);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.iterations, 0u);
  EXPECT_EQ(r.fixed_point, 3.0);
}

TEST(MultivaluedSolve, ZeroAlphaHasNoAdmissibleSuccessor) {
  const auto zero = AlphaFunction<double>::constant(0.0);
  try {
    multivalued_solve(snowflake(2), half_third(), zero, linear(0.25), 2.0, 1.0, 0.5);
    FAIL() << "expected AdmissibleSuccessorNotFound";
  } catch (const AdmissibleSuccessorNotFound& e) {
    EXPECT_EQ(e.step(), 0u);
  }
}

TEST(MultivaluedSolve, Preconditions) {
  EXPECT_THROW(multivalued_solve(snowflake(2), half_third(), one, linear(0.25), 2.0, 1.0, 0.4), PreconditionError);
  EXPECT_THROW(multivalued_solve(snowflake(2), half_third(), one, linear(0.25), 1.0, 1.0, 0.5), PreconditionError);
  MultiSolveOptions low;
  low.slack = 0.5;
  EXPECT_THROW(multivalued_solve(snowflake(2), half_third(), one, linear(0.25), 2.0, 1.0, 0.5, low),
               PreconditionError);
}

TEST(MultivaluedSolve, MaxIterGivesNotConverged) {
  MultiSolveOptions opts;
  opts.max_iter = 5;
  const auto r = multivalued_solve(snowflake(2), half_third(), one, linear(0.25), 2.0, 1.0, 0.5, opts);
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.iterations, 5u);
  EXPECT_FALSE(r.limit_admissible.has_value());
}

TEST(MultivaluedSolve, PositiveToleranceStopsEarly) {
  MultiSolveOptions opts;
  opts.tol = 1e-9;
  const auto r = multivalued_solve(snowflake(2), half_third(), one, linear(0.25), 2.0, 1.0, 0.5, opts);
  EXPECT_TRUE(r.converged);
  EXPECT_LE(r.residual, 1e-9);
  EXPECT_LT(r.iterations, 30u);
}

TEST(IsFixedPoint, Examples) {
  EXPECT_TRUE(is_fixed_point(snowflake(2), half_third(), 0.0, 0.0));
  const MultiMap<double> shift{[](const double& x) { return std::vector<double>{x + 1}; }, "shift"};
  for (double x : {-5.0, 0.0, 3.5, 1e6}) EXPECT_FALSE(is_fixed_point(real_line(), shift, x, 1e-9));
  const MultiMap<double> near{[](const double& x) { return std::vector<double>{x + 1e-12}; }, "near"};
  EXPECT_TRUE(is_fixed_point(real_line(), near, 1.0, 1e-9));
  EXPECT_FALSE(is_fixed_point(real_line(), near, 1.0, 0.0));
}

TEST(WeaklyPicard, FiveStartPairsConverge) {
  const std::vector<std::pair<double, double>> starts{{1, 0.5}, {2, 1}, {-1, -0.5}, {0.3, 0.15}, {-3, -1}};
  const auto r = weakly_picard_probe(snowflake(2), half_third(), one, linear(0.25), 2.0, starts);
  EXPECT_EQ(r.valid, 5u);
  EXPECT_EQ(r.converged, 5u);
  EXPECT_EQ(r.fraction, 1.0);
  for (const auto& e : r.entries) {
    ASSERT_TRUE(e.limit.has_value());
    EXPECT_EQ(*e.limit, 0.0);
  }
}

TEST(WeaklyPicard, VacuousAndInvalidEntries) {
  // 0.3 / 3 rounds to a double different from 0.1, so this pair is invalid.
  const auto rounding = weakly_picard_probe(snowflake(2), half_third(), one, linear(0.25), 2.0, {{0.3, 0.1}});
  EXPECT_EQ(rounding.valid, 0u);

  const auto empty = weakly_picard_probe(snowflake(2), half_third(), one, linear(0.25), 2.0, {});
  EXPECT_TRUE(empty.entries.empty());
  EXPECT_EQ(empty.fraction, 1.0);

  const auto mixed = weakly_picard_probe(snowflake(2), half_third(), one, linear(0.25), 2.0, {{1, 0.5}, {1, 0.7}});
  ASSERT_EQ(mixed.entries.size(), 2u);
  EXPECT_TRUE(mixed.entries[0].valid);
  EXPECT_FALSE(mixed.entries[1].valid);
  EXPECT_FALSE(mixed.entries[1].error.empty());
  EXPECT_EQ(mixed.valid, 1u);
  EXPECT_EQ(mixed.fraction, 1.0);

  const auto zero = AlphaFunction<double>::constant(0.0);
  const auto failing = weakly_picard_probe(snowflake(2), half_third(), zero, linear(0.25), 2.0, {{1, 0.5}});
  EXPECT_FALSE(failing.entries[0].converged);
  EXPECT_FALSE(failing.entries[0].error.empty());
  EXPECT_EQ(failing.fraction, 0.0);
}

TEST(FiniteMultiMapJson, LoadsAndSolves) {
  std::istringstream in(R"({"points": ["a", "b", "c"],
                            "images": {"a": ["b", "c"], "b": ["c"], "c": ["c"]}})");
  const auto sys = read_finite_multimap_json(in);
  EXPECT_EQ(sys.names.size(), 3u);
  EXPECT_EQ(sys.map(Label{0}), (std::vector<Label>{Label{1}, Label{2}}));
  EXPECT_EQ(sys.alpha(Label{0}, Label{2}), 1.0);
  EXPECT_TRUE(is_fixed_point(discrete_metric(3), sys.map, Label{2}, 0.0));
  const auto r = multivalued_solve(discrete_metric(3), sys.map, sys.alpha, linear(1.0), 1.0, Label{0}, Label{1});
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.fixed_point, Label{2});
}

TEST(FiniteMultiMapJson, AlphaMatrixAndErrors) {
  std::istringstream with_alpha(R"({"points": ["a", "b"], "images": {"a": ["b"], "b": ["b"]},
                                    "alpha": [[1, 0.5], [2, 1]]})");
  const auto sys = read_finite_multimap_json(with_alpha);
  EXPECT_EQ(sys.alpha(Label{0}, Label{1}), 0.5);

  auto rejects = [](const char* text) {
    std::istringstream in(text);
    EXPECT_THROW(read_finite_multimap_json(in), ParameterError) << text;
  };
  rejects(R"({"points": ["a"], "images": {"a": []}})");
  rejects(R"({"points": ["a", "a"], "images": {"a": ["a"]}})");
  rejects(R"({"points": ["a"], "images": {"a": ["z"]}})");
  rejects(R"({"points": ["a"], "images": {"a": ["a"]}, "extra": 1})");
  rejects(R"({"points": ["a"], "images": {"a": ["a"]}, "alpha": [[1, 1]]})");
  rejects(R"({"points": ["a", "b"], "images": {"a": ["a"]}})");
  rejects("not json");
}
