#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bfix {

/// Numeric verdicts are evidence, never proofs.
enum class Verdict { EvidenceFor, EvidenceAgainst, Inconclusive };
const char* to_string(Verdict v);

/// Thresholds used to classify a finite prefix of a non-negative series.
///
/// With N the horizon and N' = N/2, N'' = N'/2:
///   - divergence:     S_N / S_N' > divergence_ratio, or a non-finite term/partial sum;
///   - stabilization:  |S_N - S_N'| / max(S_N', eps) < stabilization;
///   - block decay:    (S_N - S_N') / (S_N' - S_N'') <= 2^-block_decay_margin.
///
/// The last rule reads the block ratio as 2^(1-p) for terms ~ C n^-p, so it accepts
/// p >= 1 + margin; it catches slowly converging p-series the stabilization
/// rule cannot settle at desk-scale horizons.
struct SeriesCriterion {
  double stabilization = 1e-3;
  double divergence_ratio = 1.05;
  double block_decay_margin = 0.1;
  bool use_block_decay = true;
};

struct SeriesEvidence {
  Verdict verdict = Verdict::Inconclusive;
  std::string rule;  ///< "overflow", "ratio", "stabilization", "block_decay", "undecided" or "short"
  std::size_t horizon = 0;
  double partial_half = 0.0;  ///< S_N'
  double partial_full = 0.0;  ///< S_N
  double relative_change = 0.0;
  double ratio = 1.0;
  double block_ratio = 0.0;
  double decay_exponent = 0.0;  ///< 1 - log2(block_ratio)
  /// Geometric extrapolation of the blocks beyond N; only meaningful when block_ratio < 1.
  std::optional<double> tail_estimate;
  std::optional<std::size_t> overflow_index;
};

/// Partial sums S_k = sum_{i<=k} terms[i] with compensated (Neumaier) summation.
std::vector<double> partial_sums(std::span<const double> terms);

/// Classifies sum_i terms[i], i = 0..N with N = terms.size() - 1. Callers whose series
/// starts at i = 1 pass terms[0] = 0.
SeriesEvidence classify_series(std::span<const double> terms, const SeriesCriterion& criterion = {});

}  // namespace bfix
