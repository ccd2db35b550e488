#include "collmem/features.hpp"

#include <algorithm>
#include <numeric>

namespace collmem {

namespace {

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

double pre_mortem_mean(const MentionSeries& smoothed, const FeatureWindows& w) {
  return mean_of(smoothed.window(w.pre_first, w.pre_last));
}

double short_term_boost(const MentionSeries& raw, double pre_mean, const FeatureWindows& w) {
  const auto v = raw.window(w.short_first, w.short_last);
  return *std::max_element(v.begin(), v.end()) - pre_mean;
}

double long_term_boost(const MentionSeries& smoothed, double pre_mean, const FeatureWindows& w) {
  return mean_of(smoothed.window(w.long_first, w.long_last)) - pre_mean;
}

int halving_time(std::span<const double> post) {
  if (post.empty()) throw AnalysisError("halving_time: empty post-mortem segment");
  const double floor = *std::min_element(post.begin(), post.end());
  double total = 0;
  for (double v : post) total += v - floor;
  if (!(total > 0)) return 0;
  const double half = total / 2.0;
  double acc = 0;
  for (std::size_t t = 0; t < post.size(); ++t) {
    acc += post[t] - floor;
    if (acc >= half) return static_cast<int>(t);
  }
  return static_cast<int>(post.size()) - 1;
}

int halving_time(const MentionSeries& smoothed, const FeatureWindows& w) {
  return halving_time(smoothed.window(w.halving_first, w.halving_last));
}

CurveFeatures extract_features(const MentionSeries& raw, const MentionSeries& smoothed,
                               const FeatureWindows& w) {
  if (raw.kind != SeriesKind::Raw || smoothed.kind != SeriesKind::Smoothed)
    throw AnalysisError("extract_features: expected a raw and a smoothed series");
  if (raw.person_id != smoothed.person_id || raw.medium != smoothed.medium)
    throw AnalysisError("extract_features: series belong to different persons or media");
  CurveFeatures f;
  f.person_id = raw.person_id;
  f.medium = raw.medium;
  f.pre_mortem_mean = pre_mortem_mean(smoothed, w);
  f.short_term_boost = short_term_boost(raw, f.pre_mortem_mean, w);
  f.long_term_boost = long_term_boost(smoothed, f.pre_mortem_mean, w);
  f.halving_time = halving_time(smoothed, w);
  return f;
}

}  // namespace collmem
