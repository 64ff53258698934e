#include "bfix/bmetric.hpp"

#include "csv.hpp"

#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>

namespace bfix {

std::string format_real(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

std::string format_point(double x) { return format_real(x); }
std::string format_point(const Label& x) { return "#" + std::to_string(x.index); }
std::string format_point(const Vector& x) {
  std::string out = "(";
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (i) out += ", ";
    out += format_real(x[i]);
  }
  return out + ")";
}

const char* to_string(Axiom axiom) {
  switch (axiom) {
    case Axiom::Identity: return "identity";
    case Axiom::Symmetry: return "symmetry";
    case Axiom::RelaxedTriangle: return "relaxed_triangle";
  }
  return "?";
}

BMetricSpace<double> snowflake(double q) {
  if (!std::isfinite(q) || q < 1.0) throw ParameterError("snowflake exponent q must be >= 1, got " + format_real(q));
  const double s = std::exp2(q - 1.0);
  auto d = [q](double x, double y) { return q == 1.0 ? std::abs(x - y) : std::pow(std::abs(x - y), q); };
  auto sampler = [](std::mt19937_64& rng) { return std::uniform_real_distribution<double>(-10.0, 10.0)(rng); };
  return {"snowflake(" + format_real(q) + ")", s, d, sampler};
}

BMetricSpace<double> real_line() { return snowflake(1.0); }

BMetricSpace<Vector> lp_quasinorm(double p, int dim) {
  if (!(p > 0.0 && p <= 1.0)) throw ParameterError("lp_quasinorm requires p in (0,1], got " + format_real(p));
  if (dim < 1) throw ParameterError("lp_quasinorm requires dim >= 1");
  const double s = std::exp2(1.0 / p - 1.0);
  auto d = [p, dim](const Vector& x, const Vector& y) {
    if (x.size() != dim || y.size() != dim)
      throw DistanceDomainError("lp_quasinorm point of dimension " + std::to_string(x.size()) + "/" +
                                std::to_string(y.size()) + ", expected " + std::to_string(dim));
    return std::pow((x - y).array().abs().pow(p).sum(), 1.0 / p);
  };
  auto sampler = [dim](std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    Vector v(dim);
    for (int i = 0; i < dim; ++i) v[i] = u(rng);
    return v;
  };
  return {"lp_quasinorm(" + format_real(p) + "," + std::to_string(dim) + ")", s, d, sampler};
}

BMetricSpace<Label> discrete_matrix(const Eigen::MatrixXd& table, double s, std::vector<std::string> names) {
  const Eigen::Index n = table.rows();
  if (n == 0 || table.cols() != n) throw ParameterError("discrete_matrix needs a non-empty square table");
  if (!names.empty() && static_cast<Eigen::Index>(names.size()) != n)
    throw ParameterError("discrete_matrix: " + std::to_string(names.size()) + " labels for " + std::to_string(n) +
                         " points");
  if (!table.allFinite()) throw ParameterError("discrete_matrix: non-finite entry");
  if ((table.array() < 0.0).any()) throw ParameterError("discrete_matrix: negative entry");
  if (table != table.transpose())
    throw ParameterError("discrete_matrix: table is not symmetric");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (table(i, i) != 0.0) throw ParameterError("discrete_matrix: non-zero diagonal entry at " + std::to_string(i));
    for (Eigen::Index j = 0; j < n; ++j)
      if (i != j && table(i, j) == 0.0)
        throw ParameterError("discrete_matrix: distinct points " + std::to_string(i) + ", " + std::to_string(j) +
                             " at distance 0");
  }
  if (!std::isfinite(s) || s < 1.0) throw ParameterError("discrete_matrix: s must be >= 1");

  auto shared = std::make_shared<const Eigen::MatrixXd>(table);
  auto d = [shared](const Label& x, const Label& y) {
    const auto n = static_cast<std::size_t>(shared->rows());
    if (x.index >= n || y.index >= n)
      throw DistanceDomainError("label outside the discrete space of " + std::to_string(n) + " points");
    return (*shared)(static_cast<Eigen::Index>(x.index), static_cast<Eigen::Index>(y.index));
  };
  auto sampler = [n](std::mt19937_64& rng) {
    return Label{std::uniform_int_distribution<std::size_t>(0, static_cast<std::size_t>(n) - 1)(rng)};
  };
  if (names.empty())
    for (Eigen::Index i = 0; i < n; ++i) names.push_back(std::to_string(i));
  BMetricSpace<Label> space("discrete_matrix(" + std::to_string(n) + ")", s, d, sampler);
  space = space.with_point_names(std::move(names));

  std::vector<Label> all;
  for (Eigen::Index i = 0; i < n; ++i) all.push_back(Label{static_cast<std::size_t>(i)});
  const auto report = verify_b_metric_axioms(space, all);
  if (!report.passed) {
    const auto& v = report.violations.front();
    std::ostringstream msg;
    msg << "declared s = " << format_real(s) << " fails axiom " << to_string(v.axiom) << ": lhs "
        << format_real(v.lhs) << " > rhs " << format_real(v.rhs);
    throw NotABMetric(msg.str());
  }
  return space;
}

BMetricSpace<Label> discrete_metric(std::size_t n) {
  Eigen::MatrixXd table = Eigen::MatrixXd::Ones(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  table.diagonal().setZero();
  return discrete_matrix(table, 1.0);
}

BMetricSpace<Label> read_discrete_matrix_csv(std::istream& in, double s) {
  auto rows = detail::read_csv(in);
  if (rows.empty()) throw ParameterError("discrete matrix CSV is empty");
  std::vector<std::string> names = rows.front();
  const auto n = static_cast<Eigen::Index>(names.size());
  if (static_cast<Eigen::Index>(rows.size()) != n + 1)
    throw ParameterError("discrete matrix CSV: header has " + std::to_string(n) + " labels but there are " +
                         std::to_string(rows.size() - 1) + " rows");
  Eigen::MatrixXd table(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i) + 1];
    if (static_cast<Eigen::Index>(row.size()) != n)
      throw ParameterError("discrete matrix CSV: row " + std::to_string(i + 1) + " has " + std::to_string(row.size()) +
                           " entries, expected " + std::to_string(n));
    for (Eigen::Index j = 0; j < n; ++j) table(i, j) = detail::parse_real(row[static_cast<std::size_t>(j)]);
  }
  return discrete_matrix(table, s, std::move(names));
}

std::filesystem::path sidecar_path(const std::filesystem::path& csv_path) {
  auto p = csv_path;
  return p.replace_extension(".s");
}

BMetricSpace<Label> load_discrete_matrix_csv(const std::filesystem::path& path) {
  std::ifstream side(sidecar_path(path));
  if (!side) throw ParameterError("missing sidecar file " + sidecar_path(path).string() + " holding s");
  std::string text;
  side >> text;
  const double s = detail::parse_real(text);
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open " + path.string());
  return read_discrete_matrix_csv(in, s);
}

void write_discrete_matrix_csv(std::ostream& out, const Eigen::MatrixXd& table, const std::vector<std::string>& names) {
  for (std::size_t i = 0; i < names.size(); ++i) out << (i ? "," : "") << names[i];
  out << '\n';
  for (Eigen::Index i = 0; i < table.rows(); ++i) {
    for (Eigen::Index j = 0; j < table.cols(); ++j) out << (j ? "," : "") << format_real(table(i, j));
    out << '\n';
  }
}

}  // namespace bfix
