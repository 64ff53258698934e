#pragma once

#include "bfix/bmetric.hpp"
#include "bfix/series.hpp"

#include <cmath>
#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bfix {

/// Finite record of a sequence: consecutive distances gaps[n] = d(x_n, x_{n+1}) and,
/// optionally, the points themselves with the distance that produced the gaps.
template <class P = double>
struct OrbitTrace {
  std::vector<double> gaps;
  double s = 1.0;
  std::optional<std::vector<P>> points;
  std::function<double(const P&, const P&)> distance;

  static OrbitTrace from_gaps(std::vector<double> gaps, double s) {
    for (double g : gaps)
      if (!std::isfinite(g) || g < 0.0) throw DistanceDomainError("orbit gaps must be finite and non-negative");
    OrbitTrace t;
    t.gaps = std::move(gaps);
    t.s = s;
    return t;
  }

  static OrbitTrace from_points(const BMetricSpace<P>& space, std::vector<P> pts) {
    OrbitTrace t;
    t.s = space.s();
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) t.gaps.push_back(space(pts[i], pts[i + 1]));
    t.points = std::move(pts);
    t.distance = [space](const P& x, const P& y) { return space(x, y); };
    return t;
  }
};

/// Result of the finite-sample form of d(x_0, x_k) <= s^n sum_{i<k} d(x_i, x_{i+1}).
struct DyadicBoundResult {
  double bound = 0.0;
  std::optional<double> actual;
  std::optional<bool> ok;
};

/// Validates k and n, returns s^n sum_{i<k} gaps[i].
double lemma21_bound(std::span<const double> gaps, double s, std::size_t n, std::size_t k);

/// Requires 1 <= k <= 2^n and at least k gaps; compares with d(x_0, x_k) when points are known.
template <class P>
DyadicBoundResult lemma21_check(const OrbitTrace<P>& trace, std::size_t n, std::size_t k) {
  DyadicBoundResult r;
  r.bound = lemma21_bound(trace.gaps, trace.s, n, k);
  if (trace.points && trace.distance && trace.points->size() > k) {
    r.actual = trace.distance((*trace.points)[0], (*trace.points)[k]);
    r.ok = *r.actual <= r.bound * (1.0 + 1e-12);
  }
  return r;
}

/// The constant M = s^(2 + 9/(4(alpha-1))), alpha = gamma ln 2 / ln s, bounding
/// sup_n s^((n+1)(n+2)) / 2^(gamma n^2). M = 1 for s = 1.
double big_M(double s, double gamma);

/// Throws PreconditionError unless gamma > log2(s) (gamma > 0 when s = 1).
void require_gamma_above_log2s(double s, double gamma);

struct TailBound {
  double value = 0.0;
  /// Nonzero gaps exist beyond the horizon and were not summed.
  bool truncated = false;
};

/// M sum_{i=n}^{horizon} i^gamma gaps[i], an upper bound on d(x_n, x_{n+m}) for every m
/// when the trace is complete. Requires n >= 1: at n = 0 the weight 0^gamma discards gaps[0].
TailBound tail_bound(std::span<const double> gaps, double s, double gamma, std::size_t n, std::size_t horizon);

template <class P>
TailBound tail_bound(const OrbitTrace<P>& trace, double gamma, std::size_t n, std::size_t horizon) {
  return tail_bound(trace.gaps, trace.s, gamma, n, horizon);
}

/// lhs > rhs (1 + rel), ignoring differences of a few subnormal quanta: once both sides
/// underflow, relative precision is gone and single-ulp differences carry no information.
inline bool exceeds_majorant(double lhs, double rhs, double rel) {
  return lhs > rhs * (1.0 + rel) + 4.0 * std::numeric_limits<double>::denorm_min();
}

enum class CauchyVerdict { Certified, NotCertified, Inconclusive };
const char* to_string(CauchyVerdict v);

struct CauchyCriterion {
  enum class Kind { Power, Weighted, Geometric };
  Kind kind = Kind::Power;
  double gamma = 0.0;
  double alpha = 0.0;            ///< geometric base
  std::vector<double> weights;   ///< a_n, weighted criterion only

  static CauchyCriterion power(double gamma) { return {Kind::Power, gamma, 0.0, {}}; }
  static CauchyCriterion weighted(std::vector<double> a_seq, double gamma) {
    return {Kind::Weighted, gamma, 0.0, std::move(a_seq)};
  }
  static CauchyCriterion geometric(double alpha) { return {Kind::Geometric, 0.0, alpha, {}}; }
};

struct CauchyCertificate {
  CauchyCriterion criterion;
  double s = 1.0;
  double gamma = 0.0;  ///< exponent used for tail bounds (log2 s + 1 for the geometric criterion)
  double M = 1.0;
  std::size_t horizon = 0;
  std::vector<double> partial_sums;
  SeriesEvidence series;
  CauchyVerdict verdict = CauchyVerdict::Inconclusive;
  /// Weighted criterion: min of a_n / n^gamma over [horizon/2, horizon], a finite-window
  /// stand-in for the lim inf condition.
  std::optional<double> liminf_proxy;
  bool proxy_check = false;
  std::vector<double> gaps;
  std::string note;

  TailBound tail_at(std::size_t n) const;
  /// Geometric criterion only: sum_{i>=n} alpha^-(i-n) (alpha^i gaps[i]).
  double geometric_tail(std::size_t n) const;
};

/// Weighted partial sums of the gaps (from n = 1), classified with `series_criterion`.
CauchyCertificate cauchy_report(std::span<const double> gaps, double s, const CauchyCriterion& criterion,
                                std::size_t horizon, const SeriesCriterion& series_criterion = {});

template <class P>
CauchyCertificate cauchy_report(const OrbitTrace<P>& trace, const CauchyCriterion& criterion, std::size_t horizon,
                                const SeriesCriterion& series_criterion = {}) {
  return cauchy_report(trace.gaps, trace.s, criterion, horizon, series_criterion);
}

// CSV: columns n, gap, then point coordinates (x for scalars, x0..x{d-1} for vectors).
// A trace of N+1 points has N gaps; the last row leaves the gap cell empty.

void write_trace_csv(std::ostream& out, const OrbitTrace<double>& trace);
void write_trace_csv(std::ostream& out, const OrbitTrace<Vector>& trace);

/// Reads gaps and, when coordinate columns exist, the points (as vectors; no distance attached).
OrbitTrace<Vector> read_trace_csv(std::istream& in, double s);

}  // namespace bfix
