#pragma once

#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "collmem/common.hpp"
#include "collmem/corpus.hpp"
#include "collmem/scanner.hpp"

namespace collmem {

// Day offsets relative to death covered by every series.
inline constexpr int kSeriesFirst = -360;
inline constexpr int kSeriesLast = 400;
inline constexpr int kSeriesLength = kSeriesLast - kSeriesFirst + 1;

enum class SeriesKind : std::uint8_t { Raw, Smoothed };
std::string_view to_string(SeriesKind k);

// Daily fraction S(t) = mention_docs / total_docs on the series domain;
// nullopt where the corpus has no data for that day.
using FractionSeries = std::vector<std::optional<double>>;

// log10(S(t) + epsilon) on t = kSeriesFirst..kSeriesLast; day 0 is the death day.
struct MentionSeries {
  std::string person_id;
  Medium medium = Medium::News;
  SeriesKind kind = SeriesKind::Raw;
  double epsilon = 0.0;
  std::vector<double> values = std::vector<double>(kSeriesLength, 0.0);
  // Days without data that were filled: interior gaps linearly, leading or
  // trailing gaps by the nearest observed value (the latter also listed in
  // edge_filled_days).
  std::set<int> interpolated_days;
  std::set<int> edge_filled_days;
  // Set when a segment was too short to smooth and was copied through.
  bool smoothing_skipped = false;

  double at(int t) const { return values.at(static_cast<std::size_t>(t - kSeriesFirst)); }
  double& at(int t) { return values.at(static_cast<std::size_t>(t - kSeriesFirst)); }
  // Values on the inclusive day range [from, to].
  std::span<const double> window(int from, int to) const;
};

// Day is missing when its total is zero or it is listed in `missing_days`.
FractionSeries fraction_series(const Person& person, Medium medium,
                               const DailyMentionCounts& counts,
                               const std::set<Day>& missing_days = {});

// Smallest non-zero fraction over all series of one medium.
double compute_epsilon(std::span<const FractionSeries> series);

MentionSeries build_raw_series(const std::string& person_id, Medium medium,
                               const FractionSeries& fractions, double epsilon);

struct SmootherConfig {
  // Tweeter, midrange and woofer spans as fractions of segment length.
  double spans[3] = {0.05, 0.2, 0.5};
  // Segments shorter than this are copied through unsmoothed.
  int min_segment = 10;
};

// Variable-span smoothing of an evenly spaced sequence: running local-linear
// smooths at three spans, per-point choice of span by smoothed
// leave-one-out residuals, interpolation between the span smooths, and a
// final tweeter-span pass.
std::vector<double> supersmooth(std::span<const double> y, const SmootherConfig& cfg = {});

// Running local-linear smooth with a fixed-width window of 2h+1 points,
// h = max(2, floor(span*n/2 + 1/2)), shifted inward at the ends. When
// `cv_residuals` is non-null it receives |leave-one-out residual| per point.
std::vector<double> running_line(std::span<const double> y, double span,
                                 std::vector<double>* cv_residuals = nullptr);

// Smooths t < 0 and t >= 0 independently so the death spike never leaks
// into the pre-mortem segment.
MentionSeries supersmooth(const MentionSeries& raw, const SmootherConfig& cfg = {});

}  // namespace collmem
