#include "bfix/cauchy.hpp"

#include "csv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace bfix {

double lemma21_bound(std::span<const double> gaps, double s, std::size_t n, std::size_t k) {
  if (k < 1) throw PreconditionError("lemma21_check needs k >= 1");
  if (n < 63 && k > (std::size_t{1} << n))
    throw PreconditionError("lemma21_check needs k <= 2^n; got k = " + std::to_string(k) + ", n = " + std::to_string(n));
  if (gaps.size() < k)
    throw LengthError("lemma21_check needs " + std::to_string(k) + " gaps, trace has " + std::to_string(gaps.size()));
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) sum += gaps[i];
  return std::pow(s, static_cast<double>(n)) * sum;
}

void require_gamma_above_log2s(double s, double gamma) {
  if (!std::isfinite(s) || s < 1.0) throw PreconditionError("s must be a finite real >= 1");
  if (!std::isfinite(gamma)) throw PreconditionError("gamma must be finite");
  if (s == 1.0) {
    if (!(gamma > 0.0)) throw PreconditionError("gamma must be > 0");
    return;
  }
  if (!(gamma > std::log2(s)))
    throw PreconditionError("gamma = " + format_real(gamma) + " must exceed log2(s) = " + format_real(std::log2(s)));
}

double big_M(double s, double gamma) {
  require_gamma_above_log2s(s, gamma);
  if (s == 1.0) return 1.0;
  const double alpha = gamma * std::log(2.0) / std::log(s);
  if (!(alpha > 1.0)) throw PreconditionError("gamma log_s 2 must exceed 1");
  return std::pow(s, 2.0 + 9.0 / (4.0 * (alpha - 1.0)));
}

TailBound tail_bound(std::span<const double> gaps, double s, double gamma, std::size_t n, std::size_t horizon) {
  if (n == 0)
    throw PreconditionError(
        "tail_bound needs n >= 1: the weight 0^gamma would discard d(x_0, x_1), and the bound is only "
        "established from index 1 on");
  if (horizon < n) throw PreconditionError("tail_bound needs horizon >= n");
  const double M = big_M(s, gamma);
  TailBound tb;
  if (gaps.empty()) return tb;
  const std::size_t last = std::min(horizon, gaps.size() - 1);
  // Summed from the far end so tail(n) = tail(n+1) + M n^gamma gaps[n] up to one rounding.
  double sum = 0.0;
  for (std::size_t i = last + 1; i-- > n;)
    if (gaps[i] != 0.0) sum += std::pow(static_cast<double>(i), gamma) * gaps[i];
  tb.value = M * sum;
  for (std::size_t i = last + 1; i < gaps.size(); ++i)
    if (gaps[i] != 0.0) {
      tb.truncated = true;
      break;
    }
  return tb;
}

const char* to_string(CauchyVerdict v) {
  switch (v) {
    case CauchyVerdict::Certified: return "certified";
    case CauchyVerdict::NotCertified: return "not-certified";
    case CauchyVerdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

TailBound CauchyCertificate::tail_at(std::size_t n) const {
  return tail_bound(gaps, s, gamma, n, std::max(horizon, n));
}

double CauchyCertificate::geometric_tail(std::size_t n) const {
  if (criterion.kind != CauchyCriterion::Kind::Geometric)
    throw PreconditionError("geometric_tail is defined for the geometric criterion only");
  const double a = criterion.alpha;
  double sum = 0.0;
  const std::size_t end = std::min(horizon + 1, gaps.size());
  for (std::size_t i = n; i < end; ++i)
    if (gaps[i] != 0.0)
      sum += std::pow(a, -static_cast<double>(i - n)) * (std::pow(a, static_cast<double>(i)) * gaps[i]);
  return sum;
}

CauchyCertificate cauchy_report(std::span<const double> gaps, double s, const CauchyCriterion& criterion,
                                std::size_t horizon, const SeriesCriterion& series_criterion) {
  CauchyCertificate cert;
  cert.criterion = criterion;
  cert.s = s;
  cert.gaps.assign(gaps.begin(), gaps.end());
  cert.horizon = gaps.empty() ? 0 : std::min(horizon, gaps.size() - 1);
  const std::size_t H = cert.horizon;

  std::vector<double> terms(H + 1, 0.0);
  switch (criterion.kind) {
    case CauchyCriterion::Kind::Power:
      require_gamma_above_log2s(s, criterion.gamma);
      cert.gamma = criterion.gamma;
      for (std::size_t n = 1; n <= H; ++n)
        terms[n] = gaps[n] == 0.0 ? 0.0 : std::pow(static_cast<double>(n), cert.gamma) * gaps[n];
      break;
    case CauchyCriterion::Kind::Weighted: {
      require_gamma_above_log2s(s, criterion.gamma);
      cert.gamma = criterion.gamma;
      if (criterion.weights.size() < H + 1)
        throw PreconditionError("weighted criterion needs " + std::to_string(H + 1) + " weights");
      for (std::size_t n = 1; n <= H; ++n) {
        if (!(criterion.weights[n] > 0.0) || !std::isfinite(criterion.weights[n]))
          throw PreconditionError("weights a_n must be positive and finite");
        terms[n] = gaps[n] == 0.0 ? 0.0 : criterion.weights[n] * gaps[n];
      }
      if (H >= 1) {
        double inf = std::numeric_limits<double>::infinity();
        for (std::size_t n = std::max<std::size_t>(1, H / 2); n <= H; ++n)
          inf = std::min(inf, criterion.weights[n] / std::pow(static_cast<double>(n), cert.gamma));
        cert.liminf_proxy = inf;
      }
      cert.proxy_check = true;
      break;
    }
    case CauchyCriterion::Kind::Geometric:
      if (!(criterion.alpha > 1.0) || !std::isfinite(criterion.alpha))
        throw PreconditionError("geometric criterion needs alpha > 1");
      cert.gamma = std::log2(s) + 1.0;
      for (std::size_t n = 1; n <= H; ++n)
        terms[n] = gaps[n] == 0.0 ? 0.0 : std::pow(criterion.alpha, static_cast<double>(n)) * gaps[n];
      break;
  }
  cert.M = big_M(s, cert.gamma);
  cert.series = classify_series(terms, series_criterion);
  cert.partial_sums = partial_sums(terms);

  switch (cert.series.verdict) {
    case Verdict::EvidenceFor:
      cert.verdict = CauchyVerdict::Certified;
      if (cert.proxy_check && !(cert.liminf_proxy && *cert.liminf_proxy > 0.0)) {
        cert.verdict = CauchyVerdict::Inconclusive;
        cert.note = "series stabilizes but the lim inf proxy a_n / n^gamma is not positive";
      }
      break;
    case Verdict::EvidenceAgainst: cert.verdict = CauchyVerdict::NotCertified; break;
    case Verdict::Inconclusive: cert.verdict = CauchyVerdict::Inconclusive; break;
  }
  if (cert.note.empty()) cert.note = "series rule: " + cert.series.rule;
  if (cert.proxy_check) cert.note += "; lim inf condition checked on a finite window (proxy)";
  return cert;
}

namespace {

template <class P, class WriteCoords>
void write_trace_rows(std::ostream& out, const OrbitTrace<P>& trace, const std::string& coord_header,
                      WriteCoords write_coords) {
  out << "n,gap" << coord_header << '\n';
  const std::size_t points = trace.points ? trace.points->size() : 0;
  const std::size_t rows = std::max(trace.gaps.size(), points);
  for (std::size_t n = 0; n < rows; ++n) {
    out << n << ',';
    if (n < trace.gaps.size()) out << format_real(trace.gaps[n]);
    if (trace.points) {
      if (n < points)
        write_coords(out, (*trace.points)[n]);
      else
        out << ',';
    }
    out << '\n';
  }
}

}  // namespace

void write_trace_csv(std::ostream& out, const OrbitTrace<double>& trace) {
  write_trace_rows(out, trace, trace.points ? ",x" : "", [](std::ostream& o, double x) { o << ',' << format_real(x); });
}

void write_trace_csv(std::ostream& out, const OrbitTrace<Vector>& trace) {
  std::string header;
  if (trace.points && !trace.points->empty())
    for (Eigen::Index i = 0; i < trace.points->front().size(); ++i) header += ",x" + std::to_string(i);
  write_trace_rows(out, trace, header, [](std::ostream& o, const Vector& x) {
    for (Eigen::Index i = 0; i < x.size(); ++i) o << ',' << format_real(x[i]);
  });
}

OrbitTrace<Vector> read_trace_csv(std::istream& in, double s) {
  const auto rows = detail::read_csv(in);
  if (rows.empty()) throw ParameterError("trace CSV is empty");
  const auto& header = rows.front();
  if (header.size() < 2 || header[0] != "n" || header[1] != "gap")
    throw ParameterError("trace CSV must start with columns n,gap");
  const std::size_t dim = header.size() - 2;

  OrbitTrace<Vector> trace;
  trace.s = s;
  std::vector<Vector> points;
  bool gaps_ended = false;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != header.size())
      throw ParameterError("trace CSV row " + std::to_string(r) + " has " + std::to_string(row.size()) + " cells");
    if (static_cast<std::size_t>(detail::parse_real(row[0])) != r - 1)
      throw ParameterError("trace CSV rows must be numbered 0, 1, 2, ...");
    if (row[1].empty()) {
      gaps_ended = true;
    } else {
      if (gaps_ended) throw ParameterError("trace CSV has a gap after an empty gap cell");
      const double g = detail::parse_real(row[1]);
      if (!std::isfinite(g) || g < 0.0) throw DistanceDomainError("trace CSV gap must be finite and non-negative");
      trace.gaps.push_back(g);
    }
    if (dim > 0 && !row[2].empty()) {
      Vector v(static_cast<Eigen::Index>(dim));
      for (std::size_t i = 0; i < dim; ++i) v[static_cast<Eigen::Index>(i)] = detail::parse_real(row[2 + i]);
      points.push_back(std::move(v));
    }
  }
  if (dim > 0) {
    if (!points.empty() && points.size() != trace.gaps.size() + 1)
      throw ParameterError("trace CSV with points needs exactly one more point than gaps");
    trace.points = std::move(points);
  }
  return trace;
}

}  // namespace bfix
