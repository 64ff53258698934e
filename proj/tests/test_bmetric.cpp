#include "bfix/bmetric.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace bfix;

namespace {

BMetricSpace<double> squared(double s) {
  return {"squared", s, [](double x, double y) { return (x - y) * (x - y); }};
}

}  // namespace

TEST(BMetricSpace, RejectsSBelowOne) {
  EXPECT_THROW(squared(0.5), ParameterError);
  EXPECT_THROW(squared(std::nan("")), ParameterError);
}

TEST(BMetricSpace, CheckedDistanceRejectsNegativeAndNonFinite) {
  BMetricSpace<double> bad{"bad", 1.0, [](double x, double) { return x; }};
  EXPECT_THROW(bad(-1.0, 0.0), DistanceDomainError);
  EXPECT_THROW(bad(INFINITY, 0.0), DistanceDomainError);
  EXPECT_EQ(bad(2.0, 0.0), 2.0);
}

TEST(Axioms, DiscreteMetricPasses) {
  const auto space = discrete_metric(3);
  const auto report = verify_b_metric_axioms(space, {Label{0}, Label{1}, Label{2}});
  EXPECT_TRUE(report.passed);
  EXPECT_EQ(report.triples_checked, 27u);
}

TEST(Axioms, SquaredDistanceWithSTwoPasses) {
  const auto report = verify_b_metric_axioms(squared(2.0), {0.0, 1.0, 2.0});
  EXPECT_TRUE(report.passed);
  EXPECT_EQ(report.triples_checked, 27u);
}

TEST(Axioms, SquaredDistanceWithSOneGivesWitness) {
  const auto report = verify_b_metric_axioms(squared(1.0), {0.0, 1.0, 2.0});
  ASSERT_FALSE(report.passed);
  bool found = false;
  for (const auto& v : report.violations) {
    EXPECT_EQ(v.axiom, Axiom::RelaxedTriangle);
    if (v.witness == std::vector<double>{0.0, 1.0, 2.0}) {
      found = true;
      EXPECT_EQ(v.lhs, 4.0);
      EXPECT_EQ(v.rhs, 2.0);
    }
  }
  EXPECT_TRUE(found);
}

TEST(Axioms, EmptySampleIsRejected) {
  EXPECT_THROW(verify_b_metric_axioms(squared(2.0), {}), PreconditionError);
}

TEST(Axioms, DetectsAsymmetryAndIdentityFailures) {
  BMetricSpace<double> skew{"skew", 4.0, [](double x, double y) { return x > y ? 2 * (x - y) : y - x; }};
  const auto r1 = verify_b_metric_axioms(skew, {0.0, 1.0});
  ASSERT_FALSE(r1.passed);
  EXPECT_EQ(r1.violations.front().axiom, Axiom::Symmetry);

  BMetricSpace<double> pseudo{"pseudo", 1.0, [](double x, double y) { return std::abs(std::floor(x) - std::floor(y)); }};
  const auto r2 = verify_b_metric_axioms(pseudo, {0.25, 0.5});
  ASSERT_FALSE(r2.passed);
  EXPECT_EQ(r2.violations.front().axiom, Axiom::Identity);
}

TEST(Builtins, SnowflakeConstant) {
  EXPECT_EQ(snowflake(2).s(), 2.0);
  EXPECT_EQ(snowflake(1).s(), 1.0);
  EXPECT_EQ(snowflake(3).s(), 4.0);
  EXPECT_EQ(snowflake(2)(0.0, 3.0), 9.0);
  EXPECT_THROW(snowflake(0.5), ParameterError);
}

TEST(Builtins, LpQuasinormConstant) {
  const auto sp = lp_quasinorm(0.5, 2);
  EXPECT_EQ(sp.s(), 2.0);
  Vector x(2), y(2);
  x << 0, 0;
  y << 1, 4;
  // (1^0.5 + 4^0.5)^2 = 9
  EXPECT_DOUBLE_EQ(sp(x, y), 9.0);
  EXPECT_THROW(lp_quasinorm(0.0, 2), ParameterError);
  EXPECT_THROW(lp_quasinorm(1.5, 2), ParameterError);
  EXPECT_THROW(lp_quasinorm(0.5, 0), ParameterError);
}

TEST(Builtins, FuzzedAxiomsHoldForEveryBuiltin) {
  EXPECT_TRUE(fuzz_b_metric_axioms(snowflake(2), 1000, 1).passed);
  EXPECT_TRUE(fuzz_b_metric_axioms(snowflake(1), 1000, 2).passed);
  EXPECT_TRUE(fuzz_b_metric_axioms(snowflake(3), 1000, 3).passed);
  EXPECT_TRUE(fuzz_b_metric_axioms(real_line(), 1000, 4).passed);
  EXPECT_TRUE(fuzz_b_metric_axioms(lp_quasinorm(0.5, 2), 1000, 5).passed);
  EXPECT_TRUE(fuzz_b_metric_axioms(lp_quasinorm(0.25, 3), 1000, 6).passed);
  EXPECT_TRUE(fuzz_b_metric_axioms(discrete_metric(5), 1000, 7).passed);
}

TEST(Builtins, FuzzIsDeterministicPerSeed) {
  BMetricSpace<double> sq{"sq", 1.5, [](double x, double y) { return (x - y) * (x - y); },
                          [](std::mt19937_64& rng) { return std::uniform_real_distribution<double>(-1, 1)(rng); }};
  const auto a = fuzz_b_metric_axioms(sq, 500, 11);
  const auto b = fuzz_b_metric_axioms(sq, 500, 11);
  ASSERT_EQ(a.violations.size(), b.violations.size());
  EXPECT_FALSE(a.passed);
  for (std::size_t i = 0; i < a.violations.size(); ++i) EXPECT_EQ(a.violations[i].witness, b.violations[i].witness);
}

TEST(DiscreteMatrix, ValidatesTable) {
  Eigen::MatrixXd t(3, 3);
  t << 0, 1, 4, 1, 0, 1, 4, 1, 0;
  EXPECT_THROW(discrete_matrix(t, 1.0), NotABMetric);  // 4 > 1 + 1
  const auto sp = discrete_matrix(t, 2.0);
  EXPECT_EQ(sp(Label{0}, Label{2}), 4.0);

  Eigen::MatrixXd asym = t;
  asym(0, 1) = 2;
  EXPECT_THROW(discrete_matrix(asym, 4.0), ParameterError);
  Eigen::MatrixXd diag = t;
  diag(1, 1) = 1;
  EXPECT_THROW(discrete_matrix(diag, 4.0), ParameterError);
  Eigen::MatrixXd zero_off = t;
  zero_off(0, 1) = zero_off(1, 0) = 0;
  EXPECT_THROW(discrete_matrix(zero_off, 4.0), ParameterError);
}

TEST(DiscreteMatrix, CsvRoundTripAndSidecar) {
  Eigen::MatrixXd t(3, 3);
  t << 0, 1, 4, 1, 0, 1, 4, 1, 0;
  std::stringstream buf;
  write_discrete_matrix_csv(buf, t, {"a", "b", "c"});
  const auto sp = read_discrete_matrix_csv(buf, 2.0);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      EXPECT_EQ(sp(Label{i}, Label{j}), t(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));

  const auto dir = std::filesystem::temp_directory_path() / "bfix_matrix_test";
  std::filesystem::create_directories(dir);
  const auto csv = dir / "m.csv";
  {
    std::ofstream out(csv);
    write_discrete_matrix_csv(out, t, {"a", "b", "c"});
    std::ofstream(sidecar_path(csv)) << "2\n";
  }
  EXPECT_EQ(sidecar_path(csv).filename(), "m.s");
  EXPECT_EQ(load_discrete_matrix_csv(csv).s(), 2.0);
  std::filesystem::remove(sidecar_path(csv));
  EXPECT_THROW(load_discrete_matrix_csv(csv), ParameterError);
  std::filesystem::remove_all(dir);
}

TEST(DiscreteMatrix, MalformedCsv) {
  std::stringstream ragged("a,b\n0,1\n1\n");
  EXPECT_THROW(read_discrete_matrix_csv(ragged, 1.0), ParameterError);
  std::stringstream text("a,b\n0,x\nx,0\n");
  EXPECT_THROW(read_discrete_matrix_csv(text, 1.0), ParameterError);
}

TEST(Hausdorff, SpecExamples) {
  const auto line = real_line();
  const std::vector<double> A{0.0, 1.0}, B{2.0, 5.0};
  EXPECT_EQ(hausdorff_distance(A, A, line), 0.0);
  EXPECT_EQ(hausdorff_distance<double>({0.0}, {3.0}, line), 3.0);
  EXPECT_EQ(hausdorff_distance(A, B, line), 4.0);
  EXPECT_EQ(directed_hausdorff(A, B, line), 2.0);
  EXPECT_EQ(directed_hausdorff(B, A, line), 4.0);
  EXPECT_THROW(hausdorff_distance<double>({}, B, line), EmptySetError);
  EXPECT_THROW(hausdorff_distance<double>(A, {}, line), EmptySetError);
}

TEST(Hausdorff, MatchesIndependentOraclesOnRandomSets) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<std::size_t> size(1, 8);
  for (const auto& space : {real_line(), snowflake(2), snowflake(3)}) {
    auto d = [&](double x, double y) { return space(x, y); };
    for (int trial = 0; trial < 1000; ++trial) {
      const auto A = oracle::random_reals(rng, size(rng), -5, 5);
      const auto B = oracle::random_reals(rng, size(rng), -5, 5);
      const double h = hausdorff_distance(A, B, space);
      EXPECT_EQ(h, oracle::hausdorff_double_loop(A, B, d));
      EXPECT_EQ(h, oracle::hausdorff_by_covering(A, B, d));
    }
  }
}

TEST(Hausdorff, SymmetricZeroIffEqualAndRelaxedTriangle) {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<std::size_t> size(1, 8);
  std::uniform_int_distribution<int> grid(-6, 6);
  const auto space = snowflake(2);
  for (int trial = 0; trial < 1000; ++trial) {
    // Points on a coarse grid so that equal sets occur with non-trivial frequency.
    auto draw = [&] {
      std::vector<double> out(size(rng));
      for (auto& x : out) x = grid(rng) * 0.5;
      return out;
    };
    const auto A = draw(), B = draw(), C = draw();
    const double hab = hausdorff_distance(A, B, space);
    EXPECT_EQ(hab, hausdorff_distance(B, A, space));
    EXPECT_EQ(hab == 0.0, same_set(A, B));
    EXPECT_LE(hausdorff_distance(A, C, space),
              space.s() * (hab + hausdorff_distance(B, C, space)) * (1 + 1e-12));
  }
}

TEST(Hausdorff, VectorAndLabelPoints) {
  const auto sp = lp_quasinorm(1.0, 2);
  Vector a(2), b(2);
  a << 0, 0;
  b << 1, 2;
  EXPECT_EQ(hausdorff_distance<Vector>({a}, {b}, sp), 3.0);
  const auto disc = discrete_metric(4);
  EXPECT_EQ(hausdorff_distance<Label>({Label{0}, Label{1}}, {Label{1}}, disc), 1.0);
  EXPECT_EQ(point_set_distance(Label{1}, std::vector<Label>{Label{0}, Label{1}}, disc), 0.0);
}
