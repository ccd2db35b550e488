#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "collmem/common.hpp"

namespace collmem {

// Ranks with ties replaced by their average rank (1-based).
std::vector<double> average_ranks(std::span<const double> values);

// Average ranks mapped linearly onto [-0.5, 0.5].
std::vector<double> rank_scale(std::span<const double> values);

double median(std::vector<double> values);

// Hyndman-Fan type 7 quantile.
double quantile(std::vector<double> values, double q);

struct WilcoxonResult {
  double w = 0;        // sum of ranks of positive differences
  double p = 1;        // two-sided
  std::size_t n = 0;   // non-zero differences used
  bool exact = false;
  double z = 0;        // normal score, only for the approximation
};

inline constexpr std::size_t kWilcoxonExactMax = 12;

// Signed-rank test on paired differences; zeros are dropped. Exact null
// distribution for n <= kWilcoxonExactMax, otherwise the normal approximation
// with continuity and tie correction.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> diffs);
WilcoxonResult wilcoxon_exact(std::span<const double> diffs);
WilcoxonResult wilcoxon_normal(std::span<const double> diffs);

struct Interval {
  double lo = 0;
  double hi = 0;
};

// Percentile bootstrap of the median. Replicate b draws from its own stream
// derived from `seed`, so the result does not depend on the thread count.
Interval bootstrap_median_ci(std::span<const double> values, int replicates, std::uint64_t seed,
                             double level = 0.95, unsigned threads = 0);

}  // namespace collmem
