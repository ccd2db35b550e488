#include <doctest.h>

#include <cmath>
#include <numeric>

#include "collmem/alias_index.hpp"
#include "collmem/clustering.hpp"
#include "collmem/contingency.hpp"
#include "collmem/features.hpp"
#include "collmem/scanner.hpp"
#include "collmem/synth.hpp"

using namespace collmem;

namespace {

constexpr auto kNews = ShiftedPowerLawParams::published_news();

std::vector<double> post_curve(const MentionSeries& s) {
  return {s.values.begin() + (1 - kSeriesFirst), s.values.end()};
}

}  // namespace

TEST_CASE("largest remainder apportionment") {
  CHECK(apportion({0.5, 0.5}, 3) == std::vector<int>{2, 1});
  auto a = apportion({0.62, 0.28, 0.07, 0.03}, 2362);
  CHECK(a == std::vector<int>{1465, 661, 165, 71});
  CHECK(std::accumulate(a.begin(), a.end(), 0) == 2362);
  CHECK_THROWS(apportion({0.5, 0.6}, 10));
}

TEST_CASE("noiseless generated series") {
  auto s = generate_series(kNews, 0.0, 1);
  auto fit = fit_model(ModelId::ShiftedPowerLaw, post_curve(s));
  CHECK(std::abs(fit.params[0] / kNews.a - 1) < 1e-4);
  CHECK(std::abs(fit.params[1] / kNews.b - 1) < 1e-4);
  CHECK(std::abs(fit.params[2] / kNews.c - 1) < 1e-4);
  const double want = std::log10(kNews.c) + std::log10(1 + (kNews.a / kNews.c) * std::pow(400.0, -kNews.b));
  CHECK(std::abs(s.at(400) - want) <= 0.01 * std::abs(want));
  CHECK(s.at(-100) == doctest::Approx(std::log10(kNews.c)));
  CHECK(s.at(0) == s.at(1));
}

TEST_CASE("noisy series vary by seed but agree on the exponent") {
  std::vector<double> bs;
  for (int seed = 0; seed < 30; ++seed)
    bs.push_back(fit_model(ModelId::ShiftedPowerLaw, post_curve(generate_series(kNews, 0.05, seed))).params[1]);
  const double mean = std::accumulate(bs.begin(), bs.end(), 0.0) / bs.size();
  double var = 0;
  for (double b : bs) var += (b - mean) * (b - mean);
  const double sd = std::sqrt(var / (bs.size() - 1));
  auto s1 = generate_series(kNews, 0.05, 101), s2 = generate_series(kNews, 0.05, 202);
  CHECK(s1.values != s2.values);
  const double b1 = fit_model(ModelId::ShiftedPowerLaw, post_curve(s1)).params[1];
  const double b2 = fit_model(ModelId::ShiftedPowerLaw, post_curve(s2)).params[1];
  CHECK(std::abs(b1 - b2) < 3 * sd);
}

TEST_CASE("population generator") {
  PopulationSpec spec;
  spec.n = 1000;
  auto a = generate_population(spec), b = generate_population(spec);
  CHECK(a.ids == b.ids);
  CHECK(a.news_labels == b.news_labels);
  CHECK(a.news[5].short_term_boost == b.news[5].short_term_boost);

  auto m = confusion(a.ids, a.news_labels, 4, a.ids, a.twitter_labels, 4);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      if (i != j) CHECK(m.counts[i][j] == 0);

  // mismatch 1 with uniform shares: labels are independent
  PopulationSpec mix = spec;
  mix.n = 20000;
  mix.mismatch = 1.0;
  for (auto& arch : mix.archetypes) arch.news_share = arch.twitter_share = 0.25;
  auto p = generate_population(mix);
  auto mm = confusion(p.ids, p.news_labels, 4, p.ids, p.twitter_labels, 4);
  const double e = expected_trace(mm.row_marginals(), mm.col_marginals());
  CHECK(std::abs(mm.trace() - e) < 4 * std::sqrt(e));
}

TEST_CASE("separable archetypes give four clusters") {
  PopulationSpec spec;
  spec.n = 400;
  spec.blob_sigma = 0.01;
  auto p = generate_population(spec);
  auto z = standardize(feature_matrix(p.news));
  KMeansOptions o;
  o.restarts = 10;
  CHECK(select_k(z.z, 2, 10, 3, o).best_k == 4);
}

TEST_CASE("corpus closed loop") {
  CorpusSpec spec;
  spec.n_persons = 8;
  spec.zero_mention_persons = 2;
  spec.days = 60;
  spec.news_docs_per_day = 30;
  spec.twitter_docs_per_day = 30;
  auto c = generate_corpus(spec);
  auto idx = AliasIndex::build(c.persons);
  auto counts = aggregate_counts(c.documents, idx, c.window, 3);
  CHECK(counts == c.truth);
  counts.validate();
  CHECK(generate_corpus(spec).documents.size() == c.documents.size());

  spec.news_single_mention_rate = 1.0;
  auto single = generate_corpus(spec);
  auto idx2 = AliasIndex::build(single.persons);
  auto sc = aggregate_counts(single.documents, idx2, single.window, 2);
  std::int64_t news_mentions = 0;
  for (const auto& [k, v] : sc.mentions)
    if (k.medium == Medium::News) news_mentions += v;
  CHECK(news_mentions == 0);

  CorpusSpec hot = spec;
  hot.base_max = 0.5;
  hot.base_min = 0.4;
  CHECK_THROWS_AS(generate_corpus(hot), InputError);
}

TEST_CASE("zero-mention person has a flat series at log10(epsilon)") {
  CorpusSpec spec;
  spec.n_persons = 3;
  spec.zero_mention_persons = 1;
  spec.days = 40;
  auto c = generate_corpus(spec);
  const Person& ghost = c.persons.back();
  auto f = fraction_series(ghost, Medium::Twitter, c.truth);
  auto s = build_raw_series(ghost.id, Medium::Twitter, f, 1e-7);
  for (double v : s.values) CHECK(v == doctest::Approx(-7.0));
}

TEST_CASE("counts to features reproduce analytic values before smoothing") {
  Person p;
  p.id = "p";
  p.death_date = Day{20000};
  DailyMentionCounts c;
  const std::int64_t total = 1'000'000;
  auto mentions_at = [](int t) -> std::int64_t {
    if (t < 0) return 20;
    return 20 + 4000 / (t + 1);
  };
  for (int t = kSeriesFirst; t <= kSeriesLast; ++t) {
    c.totals[{Medium::News, Day{20000 + t}}] = total;
    c.mentions[MentionKey{"p", Medium::News, Day{20000 + t}}] = mentions_at(t);
  }
  c.mentions[MentionKey{"p", Medium::News, Day{20000 - 200}}] = 1;
  std::vector<FractionSeries> fs{fraction_series(p, Medium::News, c)};
  const double eps = compute_epsilon(fs);
  CHECK(eps == 1e-6);
  auto raw = build_raw_series("p", Medium::News, fs[0], eps);
  const double pre = pre_mortem_mean(raw);
  double want_pre = 0;
  for (int t = -360; t <= -30; ++t) want_pre += std::log10((t == -200 ? 1 : 20) / 1e6 + eps);
  want_pre /= 331;
  CHECK(std::abs(pre - want_pre) < 1e-9);
  const double want_short = std::log10(mentions_at(0) / 1e6 + eps) - want_pre;
  CHECK(std::abs(short_term_boost(raw, pre) - want_short) < 1e-9);
}
