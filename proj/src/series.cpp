#include "bfix/series.hpp"

#include "bfix/errors.hpp"

#include <cmath>
#include <limits>

namespace bfix {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::EvidenceFor: return "evidence-for";
    case Verdict::EvidenceAgainst: return "evidence-against";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

std::vector<double> partial_sums(std::span<const double> terms) {
  std::vector<double> out;
  out.reserve(terms.size());
  double sum = 0.0, comp = 0.0;
  for (double t : terms) {
    const double next = sum + t;
    if (std::abs(sum) >= std::abs(t))
      comp += (sum - next) + t;
    else
      comp += (t - next) + sum;
    sum = next;
    out.push_back(sum + comp);
  }
  return out;
}

SeriesEvidence classify_series(std::span<const double> terms, const SeriesCriterion& criterion) {
  SeriesEvidence ev;
  if (terms.empty()) {
    ev.rule = "short";
    return ev;
  }
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (terms[i] < 0.0) throw RangeError("negative series term at index " + std::to_string(i));
    if (!std::isfinite(terms[i])) {
      ev.verdict = Verdict::EvidenceAgainst;
      ev.rule = "overflow";
      ev.overflow_index = i;
      return ev;
    }
  }
  const auto S = partial_sums(terms);
  const std::size_t N = terms.size() - 1;
  ev.horizon = N;
  for (std::size_t i = 0; i <= N; ++i)
    if (!std::isfinite(S[i])) {
      ev.verdict = Verdict::EvidenceAgainst;
      ev.rule = "overflow";
      ev.overflow_index = i;
      return ev;
    }

  const std::size_t half = N / 2, quarter = half / 2;
  ev.partial_half = S[half];
  ev.partial_full = S[N];
  constexpr double eps = std::numeric_limits<double>::epsilon();
  ev.relative_change = std::abs(S[N] - S[half]) / std::max(S[half], eps);
  if (S[half] > 0.0)
    ev.ratio = S[N] / S[half];
  else
    ev.ratio = S[N] > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;

  const double b1 = S[half] - S[quarter];
  const double b2 = S[N] - S[half];
  if (b1 > 0.0)
    ev.block_ratio = b2 / b1;
  else
    ev.block_ratio = b2 > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  ev.decay_exponent = ev.block_ratio > 0.0 ? 1.0 - std::log2(ev.block_ratio) : std::numeric_limits<double>::infinity();
  if (ev.block_ratio < 1.0) ev.tail_estimate = b2 * ev.block_ratio / (1.0 - ev.block_ratio);

  if (S[N] == 0.0) {
    ev.verdict = Verdict::EvidenceFor;
    ev.rule = "stabilization";
    return ev;
  }
  if (N < 4) {
    ev.rule = "short";
    return ev;
  }
  if (ev.ratio > criterion.divergence_ratio) {
    ev.verdict = Verdict::EvidenceAgainst;
    ev.rule = "ratio";
  } else if (ev.relative_change < criterion.stabilization) {
    ev.verdict = Verdict::EvidenceFor;
    ev.rule = "stabilization";
  } else if (criterion.use_block_decay && ev.block_ratio <= std::exp2(-criterion.block_decay_margin)) {
    ev.verdict = Verdict::EvidenceFor;
    ev.rule = "block_decay";
  } else {
    ev.rule = "undecided";
  }
  return ev;
}

}  // namespace bfix
