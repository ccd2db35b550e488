#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "collmem/corpus.hpp"
#include "collmem/features.hpp"
#include "collmem/memory_model.hpp"
#include "collmem/scanner.hpp"
#include "collmem/series.hpp"

namespace collmem {

// Largest-remainder rounding of shares * n; the result sums to n.
std::vector<int> apportion(const std::vector<double>& shares, int n);

// Raw series with value(t) = log10(a t^-b + c) + N(0, sigma) for t >= 1,
// log10(c) + N(0, sigma) for t < 0 and the t = 1 value on the death day.
MentionSeries generate_series(const ShiftedPowerLawParams& p, double sigma, std::uint64_t seed,
                              std::string person_id = "synthetic", Medium medium = Medium::News);

struct Archetype {
  std::string name;
  double news_share = 0;
  double twitter_share = 0;
  // pre_mean, short_boost, long_boost, halving_time
  std::array<double, 4> news_centroid{};
  std::array<double, 4> twitter_centroid{};
};

// Four shapes: blip, silence, rise, decline, in decreasing size.
std::vector<Archetype> default_archetypes();

// Natural spread of each feature; blob_sigma is expressed in these units.
inline constexpr std::array<double, 4> kFeatureUnits = {0.5, 0.5, 0.2, 60.0};

struct PopulationSpec {
  std::vector<Archetype> archetypes = default_archetypes();
  int n = 2000;
  double blob_sigma = 0.15;
  // Probability that a person's Twitter label is redrawn from the Twitter
  // shares independently of the news label.
  double mismatch = 0.0;
  std::uint64_t seed = 1;
};

struct Population {
  std::vector<std::string> ids;
  std::vector<int> news_labels;
  std::vector<int> twitter_labels;
  std::vector<CurveFeatures> news;
  std::vector<CurveFeatures> twitter;
};

Population generate_population(const PopulationSpec& spec);

struct CorpusSpec {
  int n_persons = 40;
  int zero_mention_persons = 0;  // registered but never planted
  Day first{15000};
  int days = 730;
  int news_docs_per_day = 60;
  int twitter_docs_per_day = 80;
  // Per-person mention probability per document: base before death,
  // base * (1 + boost * (t + 1)^-decay) from the death day on. The base is
  // drawn log-uniformly from [base_min, base_max].
  double base_min = 0.002;
  double base_max = 0.02;
  double boost = 20.0;
  double decay = 1.0;
  // Share of planted news mentions rendered with a single occurrence of the
  // name; those documents do not count under the news rule.
  double news_single_mention_rate = 0.1;
  std::uint64_t seed = 7;
};

struct SynthCorpus {
  std::vector<Person> persons;
  std::vector<Document> documents;  // ordered by day, then medium, then index
  DailyMentionCounts truth;
  CorpusWindow window;
};

// Throws InputError when a planted mention probability would exceed 1.
SynthCorpus generate_corpus(const CorpusSpec& spec);

struct CountsSpec {
  int n_persons = 200;
  ShiftedPowerLawParams news = ShiftedPowerLawParams::published_news();
  ShiftedPowerLawParams twitter = ShiftedPowerLawParams::published_twitter();
  double person_sigma = 0.3;  // per-person log offset, centered to mean 0
  double day_sigma = 0.05;    // daily log noise
  std::int64_t docs_per_day = 100'000'000'000;
  // A day on which each person has a single mention, so that the smallest
  // non-zero fraction sits far below every modeled level.
  int quiet_day = -15;
  Day first{14400};
  int days = 1900;
  std::uint64_t seed = 11;
};

struct SynthCounts {
  std::vector<Person> persons;
  DailyMentionCounts counts;
  CorpusWindow window;
};

// Document-level counts for a population following the shifted power law on
// the log scale; persons get random but fully specified biographic factors.
SynthCounts generate_counts(const CountsSpec& spec);

}  // namespace collmem
