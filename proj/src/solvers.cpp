#include "bfix/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bfix {

AprioriBound apriori_error_from_majorant(std::span<const double> majorant, double gamma, double s, std::size_t n,
                                         const AprioriOptions& options) {
  const double M = big_M(s, gamma);
  if (n == 0) throw PreconditionError("apriori_error needs n >= 1");
  if (majorant.empty()) throw PreconditionError("apriori_error needs at least one majorant term");
  const std::size_t H = majorant.size() - 1;
  if (H < n) throw PreconditionError("apriori_error needs horizon >= n");
  if (majorant[0] < 0.0 || !std::isfinite(majorant[0])) throw PreconditionError("d0 must be finite and >= 0");

  AprioriBound out;
  if (majorant[0] == 0.0) return out;

  auto term = [&](std::size_t i) {
    const double m = majorant[i];
    return m == 0.0 ? 0.0 : std::pow(static_cast<double>(i), gamma) * m;
  };
  double sum = 0.0;
  for (std::size_t i = H + 1; i-- > n;) sum += term(i);

  const double last = term(H);
  if (last == 0.0) {
    out.value = s * M * sum;
    return out;
  }
  const std::size_t start = std::max(n, H / 10);
  double q = start < H ? 0.0 : std::numeric_limits<double>::infinity();
  for (std::size_t i = start; i < H; ++i) {
    const double t = term(i), next = term(i + 1);
    if (t > 0.0)
      q = std::max(q, next / t);
    else if (next > 0.0)
      q = std::numeric_limits<double>::infinity();
  }
  out.ratio = q;
  if (q <= options.max_ratio)
    sum += last * q / (1.0 - q);
  else
    out.truncated = true;
  out.value = s * M * sum;
  return out;
}

AprioriBound apriori_error(const ComparisonFunction& phi, double gamma, double s, double d0, std::size_t n,
                           std::size_t horizon, const AprioriOptions& options) {
  require_gamma_above_log2s(s, gamma);
  if (!(d0 >= 0.0) || !std::isfinite(d0)) throw PreconditionError("d0 must be finite and >= 0");
  std::vector<double> majorant{d0};
  majorant.reserve(horizon + 1);
  while (majorant.size() <= horizon) majorant.push_back(d0 == 0.0 ? 0.0 : phi(majorant.back()));
  return apriori_error_from_majorant(majorant, gamma, s, n, options);
}

}  // namespace bfix
