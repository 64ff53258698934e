#pragma once

#include "bfix/point.hpp"
#include "bfix/solvers.hpp"

#include <json.hpp>

namespace bfix {

using Json = nlohmann::ordered_json;

inline Json point_to_json(double x) { return x; }
inline Json point_to_json(const Label& x) { return x.index; }
inline Json point_to_json(const Vector& x) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < x.size(); ++i) out.push_back(x[i]);
  return out;
}

inline Json to_json(const HypothesisViolation& v) {
  return Json{{"kind", v.kind}, {"step", v.step}, {"lhs", v.lhs}, {"rhs", v.rhs}};
}

/// {fixed_point, iterations, residual, bounds, violations, converged, assumptions}
template <class P>
Json to_json(const SolveReport<P>& r) {
  Json violations = Json::array();
  for (const auto& v : r.hypothesis_violations) violations.push_back(to_json(v));
  return Json{{"method", r.method},
              {"fixed_point", point_to_json(r.fixed_point)},
              {"iterations", r.iterations},
              {"residual", r.residual},
              {"bounds", r.error_bound_history},
              {"bound_truncated", r.bound_truncated},
              {"violations", violations},
              {"converged", r.converged},
              {"assumptions", r.assumptions}};
}

}  // namespace bfix
