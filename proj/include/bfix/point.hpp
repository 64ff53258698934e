#pragma once

#include <Eigen/Core>

#include <compare>
#include <cstddef>
#include <string>
#include <vector>

namespace bfix {

/// Element of a finite discrete space, identified by its row in the distance table.
struct Label {
  std::size_t index = 0;
  friend auto operator<=>(const Label&, const Label&) = default;
};

using Vector = Eigen::VectorXd;

inline bool points_equal(double x, double y) { return x == y; }
inline bool points_equal(const Label& x, const Label& y) { return x.index == y.index; }
inline bool points_equal(const Vector& x, const Vector& y) {
  return x.size() == y.size() && (x.array() == y.array()).all();
}

/// True iff `x` occurs in `set` (exact point equality).
template <class P>
bool contains(const std::vector<P>& set, const P& x) {
  for (const auto& y : set)
    if (points_equal(x, y)) return true;
  return false;
}

/// Set equality of two finite point lists, ignoring order and multiplicity.
template <class P>
bool same_set(const std::vector<P>& a, const std::vector<P>& b) {
  for (const auto& x : a)
    if (!contains(b, x)) return false;
  for (const auto& y : b)
    if (!contains(a, y)) return false;
  return true;
}

std::string format_point(double x);
std::string format_point(const Label& x);
std::string format_point(const Vector& x);

/// Shortest round-trip decimal representation; used for every CSV cell.
std::string format_real(double x);

}  // namespace bfix
