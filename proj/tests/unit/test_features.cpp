#include <doctest.h>

#include <cmath>
#include <random>

#include "collmem/features.hpp"
#include "collmem/regression.hpp"
#include "helpers.hpp"

using namespace collmem;

namespace {

int naive_halving(const std::vector<double>& v) {
  double lo = v[0];
  for (double x : v) lo = std::min(lo, x);
  double total = 0;
  for (double x : v) total += x - lo;
  if (total <= 0) return 0;
  for (std::size_t T = 0; T < v.size(); ++T) {
    double a = 0;
    for (std::size_t i = 0; i <= T; ++i) a += v[i] - lo;
    if (a >= total / 2) return static_cast<int>(T);
  }
  return static_cast<int>(v.size()) - 1;
}

MentionSeries random_series(std::mt19937_64& gen, SeriesKind kind = SeriesKind::Raw) {
  std::normal_distribution<double> n(0, 0.3);
  auto s = testutil::constant_series(0);
  const double base = -7 + 2 * n(gen), spike = 1 + std::abs(n(gen)) * 5, decay = 0.3 + std::abs(n(gen));
  for (int t = kSeriesFirst; t <= kSeriesLast; ++t)
    s.at(t) = base + n(gen) + (t >= 0 ? spike * std::pow(t + 1.0, -decay) : 0.0);
  s.kind = kind;
  return s;
}

}  // namespace

TEST_CASE("pre-mortem mean") {
  CHECK(pre_mortem_mean(testutil::constant_series(-5)) == doctest::Approx(-5));
  auto s = testutil::constant_series(0);
  for (int t = -360; t <= -196; ++t) s.at(t) = -6;
  for (int t = -195; t <= -30; ++t) s.at(t) = -4;
  CHECK(pre_mortem_mean(s) == doctest::Approx((165 * -6.0 + 166 * -4.0) / 331).epsilon(1e-14));
  const double before = pre_mortem_mean(s);
  for (int t = -29; t <= -1; ++t) s.at(t) = 100.0 * t;
  CHECK(pre_mortem_mean(s) == before);
}

TEST_CASE("boosts") {
  auto raw = testutil::constant_series(-5);
  raw.at(3) = -3;
  CHECK(short_term_boost(raw, -5) == doctest::Approx(2.0));
  raw.at(30) = 10;  // outside the short window
  CHECK(short_term_boost(raw, -5) == doctest::Approx(2.0));
  CHECK(long_term_boost(testutil::constant_series(-5), -5) == 0.0);
  CHECK(multiplicative_effect(1.98) == doctest::Approx(95).epsilon(0.011));
  CHECK(multiplicative_effect(2.45) == doctest::Approx(281).epsilon(0.004));
  CHECK(std::abs(multiplicative_effect(0.016) - 1.038) < 1e-3);
}

TEST_CASE("halving time") {
  std::vector<double> spike(361, 0.0);
  spike[0] = 4;
  CHECK(halving_time(spike) == 0);
  std::vector<double> block(361, 0.0);
  for (int i = 0; i < 4; ++i) block[i] = 1;
  CHECK(halving_time(block) == 1);
  CHECK(halving_time(std::vector<double>(361, -3.0)) == 0);

  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> u(-6, -2);
  for (int rep = 0; rep < 300; ++rep) {
    std::vector<double> v(1 + gen() % 60);
    for (double& x : v) x = u(gen);
    CHECK(halving_time(v) == naive_halving(v));
  }
}

TEST_CASE("halving time grows when mass moves later") {
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> u(0, 1);
  for (int rep = 0; rep < 300; ++rep) {
    std::vector<double> v(80);
    for (double& x : v) x = u(gen);
    v[gen() % 80] = -1;  // pin the minimum so moved mass keeps its area
    const int before = halving_time(v);
    std::size_t i = gen() % 79, j = i + 1 + gen() % (79 - i);
    if (v[i] < 0 || v[j] < 0) continue;
    const double moved = v[i] * u(gen);
    v[i] -= moved;
    v[j] += moved;
    CHECK(halving_time(v) >= before);
  }
}

TEST_CASE("feature invariants on randomized series") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> shift(-3, 3);
  for (int rep = 0; rep < 1000; ++rep) {
    const MentionSeries raw = random_series(gen);
    const MentionSeries sm = random_series(gen, SeriesKind::Smoothed);
    const CurveFeatures f = extract_features(raw, sm);

    // translation invariance
    const double d = shift(gen);
    MentionSeries raw2 = raw, sm2 = sm;
    for (double& v : raw2.values) v += d;
    for (double& v : sm2.values) v += d;
    const CurveFeatures g = extract_features(raw2, sm2);
    CHECK(g.short_term_boost == doctest::Approx(f.short_term_boost).epsilon(1e-9));
    CHECK(g.long_term_boost == doctest::Approx(f.long_term_boost).epsilon(1e-9));
    CHECK(g.halving_time == f.halving_time);
    CHECK(g.pre_mortem_mean - f.pre_mortem_mean == doctest::Approx(d).epsilon(1e-9));

    // the 29 days before death never matter
    MentionSeries raw3 = raw, sm3 = sm;
    for (int t = -29; t <= -1; ++t) {
      raw3.at(t) = shift(gen);
      sm3.at(t) = shift(gen);
    }
    const CurveFeatures h = extract_features(raw3, sm3);
    CHECK(h.pre_mortem_mean == f.pre_mortem_mean);
    CHECK(h.short_term_boost == f.short_term_boost);
    CHECK(h.long_term_boost == f.long_term_boost);
    CHECK(h.halving_time == f.halving_time);

    // pure function
    const CurveFeatures again = extract_features(raw, sm);
    CHECK(again.short_term_boost == f.short_term_boost);
    CHECK(again.halving_time == f.halving_time);
  }
}
