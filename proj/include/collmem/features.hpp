#pragma once

#include <span>
#include <string>

#include "collmem/series.hpp"

namespace collmem {

// Inclusive day windows used by the four characteristic numbers.
struct FeatureWindows {
  int pre_first = -360, pre_last = -30;
  int short_first = 0, short_last = 29;
  int long_first = 30, long_last = 360;
  int halving_first = 0, halving_last = 360;
};

struct CurveFeatures {
  std::string person_id;
  Medium medium = Medium::News;
  double pre_mortem_mean = 0;   // log10 units
  double short_term_boost = 0;  // log10 units
  double long_term_boost = 0;   // log10 units
  int halving_time = 0;         // days
};

// Mean of smoothed values over the pre-mortem window.
double pre_mortem_mean(const MentionSeries& smoothed, const FeatureWindows& w = {});
// Maximum raw value over the short-term window minus the pre-mortem mean.
double short_term_boost(const MentionSeries& raw, double pre_mean, const FeatureWindows& w = {});
// Mean smoothed value over the long-term window minus the pre-mortem mean.
double long_term_boost(const MentionSeries& smoothed, double pre_mean, const FeatureWindows& w = {});

// Smallest T with A(T) >= A(last)/2, where A(T) sums (value - min) over the
// first T+1 days of `post` and min is taken over `post`. A flat segment
// yields 0.
int halving_time(std::span<const double> post);
int halving_time(const MentionSeries& smoothed, const FeatureWindows& w = {});

CurveFeatures extract_features(const MentionSeries& raw, const MentionSeries& smoothed,
                               const FeatureWindows& w = {});

}  // namespace collmem
