#include <doctest.h>

#include <cmath>
#include <random>

#include "collmem/memory_model.hpp"
#include "collmem/synth.hpp"
#include "helpers.hpp"

using namespace collmem;

namespace {

constexpr auto kNews = ShiftedPowerLawParams::published_news();
constexpr auto kTwitter = ShiftedPowerLawParams::published_twitter();

std::vector<double> log_curve(ModelId id, std::vector<double> params, int n = 400) {
  std::vector<double> y(n);
  for (int t = 1; t <= n; ++t) y[t - 1] = std::log10(eval_model(id, params, t));
  return y;
}

std::vector<double> spl_curve(ShiftedPowerLawParams p) {
  return log_curve(ModelId::ShiftedPowerLaw, {p.a, p.b, p.c});
}

double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

double variance(const std::vector<double>& y) {
  double m = 0;
  for (double v : y) m += v;
  m /= y.size();
  double s = 0;
  for (double v : y) s += (v - m) * (v - m);
  return s / y.size();
}

}  // namespace

TEST_CASE("mean of log series") {
  auto a = testutil::constant_series(-4.0), b = testutil::constant_series(-6.0);
  std::vector<MentionSeries> two{a, b}, one{a}, same{a, a, a};
  CHECK(mean_log_series(two)[0] == -5.0);
  CHECK(mean_log_series(one) == a.values);
  CHECK(mean_log_series(same) == a.values);
  std::vector<MentionSeries> mixed{a, testutil::constant_series(-4.0, Medium::Twitter)};
  CHECK_THROWS_AS(mean_log_series(mixed), AnalysisError);
}

TEST_CASE("shifted power law evaluation") {
  const std::vector<double> p{kNews.a, kNews.b, kNews.c};
  CHECK(eval_model(ModelId::ShiftedPowerLaw, p, 1) == doctest::Approx(5.755e-5).epsilon(1e-12));
  for (double t : {1.0, 7.0, 300.0})
    CHECK(eval_model(ModelId::ShiftedPowerLaw, std::vector<double>{2e-5, 0.0, 1e-6}, t) ==
          doctest::Approx(2.1e-5));
  CHECK(rel(eval_model(ModelId::ShiftedPowerLaw, p, 1e4), kNews.c) < 0.01);
  CHECK_THROWS_AS(eval_model(ModelId::PowerLaw, std::vector<double>{1, 1}, 0), std::domain_error);
  CHECK_THROWS_AS(eval_model(ModelId::PowerLaw, std::vector<double>{1}, 1), std::invalid_argument);
}

TEST_CASE("noiseless round trip recovers published parameters") {
  for (auto p : {kNews, kTwitter}) {
    auto fit = fit_model(ModelId::ShiftedPowerLaw, spl_curve(p));
    REQUIRE(fit.converged);
    CHECK(rel(fit.params[0], p.a) < 1e-4);
    CHECK(rel(fit.params[1], p.b) < 1e-4);
    CHECK(rel(fit.params[2], p.c) < 1e-4);
    CHECK(fit.r2_log >= 1 - 1e-10);
  }
}

TEST_CASE("constant curve puts everything in the cultural component") {
  std::vector<double> y(400, -5.0);
  auto fit = fit_model(ModelId::ShiftedPowerLaw, y);
  const auto p = ShiftedPowerLawParams::from_fit(fit);
  CHECK(rel(p.c, 1e-5) < 1e-3);
  CHECK(decompose(p, 1).communicative_share < 1e-3);
}

TEST_CASE("decomposition and derived days") {
  const double t_star = std::pow(kNews.a / kNews.c, 1 / kNews.b);
  CHECK(decompose(kNews, t_star).communicative_share == doctest::Approx(0.5));
  CHECK(decompose(kNews, 31).communicative_share <= 0.25);
  CHECK(decompose(kNews, 30).communicative_share > 0.25);
  double prev = 1;
  for (int t = 1; t <= 400; ++t) {
    const double s = decompose(kNews, t).communicative_share;
    CHECK(s < prev);
    prev = s;
  }
  CHECK(crossover_time(kNews) == 14);
  CHECK(crossover_time(kTwitter) == 18);
  CHECK(quantile_time(kNews, 0.25) == 31);
  CHECK(quantile_time(kTwitter, 0.25) == 36);
  CHECK(crossover_time({1e-5, 1.2, 1e-5}) == 2);
  for (auto p : {kNews, kTwitter}) CHECK(quantile_time(p, 0.5) == crossover_time(p));
  CHECK_THROWS_AS(quantile_time(kNews, 1.0), std::invalid_argument);
}

TEST_CASE("forgetting rate identity") {
  auto fit = fit_model(ModelId::ShiftedPowerLaw, spl_curve(kNews));
  const auto p = ShiftedPowerLawParams::from_fit(fit);
  for (double t : {2.0, 10.0, 100.0}) {
    const double h = 1e-4 * t;
    const double du = (decompose(p, t + h).u - decompose(p, t - h).u) / (2 * h);
    CHECK(rel(du, -(p.b / t) * decompose(p, t).u) < 1e-3);
  }
}

TEST_CASE("model catalog on generated data") {
  const auto catalog = default_catalog();
  CHECK(catalog.size() == 9);
  CHECK(catalog.front() == ModelId::ShiftedPowerLaw);

  auto cmp = compare_models(catalog, spl_curve(kNews));
  REQUIRE(!cmp.ranked.empty());
  CHECK(cmp.ranked.front().model == ModelId::ShiftedPowerLaw);
  CHECK(std::abs(cmp.ranked.front().r2_log - 1) < 1e-9);

  auto ex = compare_models(catalog, log_curve(ModelId::Exponential, {1e-4, 0.02}));
  for (const auto& f : ex.ranked)
    if (f.model == ModelId::Exponential) CHECK(std::abs(f.r2_log - 1) < 1e-9);

  auto bi = compare_models(catalog, log_curve(ModelId::Biexponential, {1e-4, 0.2, 1e-6, 0.002}));
  bool seen = false;
  for (const auto& f : bi.ranked)
    if (f.model == ModelId::Biexponential) {
      seen = true;
      CHECK(std::abs(f.r2_log - 1) < 1e-9);
    }
  CHECK(seen);

  std::vector<ModelId> twice{ModelId::ShiftedPowerLaw, ModelId::ShiftedPowerLaw};
  auto dup = compare_models(twice, spl_curve(kTwitter));
  REQUIRE(dup.ranked.size() == 2);
  CHECK(dup.ranked[0].params == dup.ranked[1].params);
  CHECK(dup.ranked[0].sse_log == dup.ranked[1].sse_log);
}

TEST_CASE("fit never ends above any start point") {
  std::mt19937_64 gen(5);
  std::normal_distribution<double> noise(0, 0.05);
  auto y = spl_curve(kNews);
  for (double& v : y) v += noise(gen);
  for (ModelId id : default_catalog()) {
    MemoryModelFit fit;
    try {
      fit = fit_model(id, y);
    } catch (const FitError& e) {
      fit = e.best();
    }
    for (const auto& s : fit.starts) CHECK(fit.sse_log <= s.initial_sse * (1 + 1e-12));
    CHECK(fit.sse_log == doctest::Approx(log_sse(id, fit.params, y)).epsilon(1e-9));
  }
}

TEST_CASE("scale equivariance") {
  const double kappa = 37.0;
  auto base = fit_model(ModelId::ShiftedPowerLaw, spl_curve(kTwitter));
  auto scaled = fit_model(ModelId::ShiftedPowerLaw,
                          spl_curve({kappa * kTwitter.a, kTwitter.b, kappa * kTwitter.c}));
  CHECK(rel(scaled.params[0], kappa * base.params[0]) < 1e-5);
  CHECK(rel(scaled.params[1], base.params[1]) < 1e-5);
  CHECK(rel(scaled.params[2], kappa * base.params[2]) < 1e-5);
}

TEST_CASE("goodness of fit under log noise") {
  // Noise of 0.05 on the mean curve itself caps R^2 at 1 - 0.05^2 / Var(curve),
  // about 0.86 for the news curve; the fit should sit at that ceiling.
  std::mt19937_64 gen(8);
  std::normal_distribution<double> noise(0, 0.05);
  for (auto p : {kNews, kTwitter}) {
    auto clean = spl_curve(p);
    auto y = clean;
    for (double& v : y) v += noise(gen);
    auto fit = fit_model(ModelId::ShiftedPowerLaw, y);
    const double ceiling = 1 - 0.05 * 0.05 / variance(clean);
    CHECK(fit.r2_log == doctest::Approx(ceiling).epsilon(0.03));
  }
  // Person-level noise of 0.05 averaged over a population puts the fit in
  // the R^2 >= 0.99 regime.
  for (auto p : {kNews, kTwitter}) {
    std::vector<MentionSeries> persons;
    for (int i = 0; i < 200; ++i) persons.push_back(generate_series(p, 0.05, 100 + i));
    auto mean = mean_log_series(persons);
    std::vector<double> y(mean.begin() + (1 - kSeriesFirst), mean.end());
    REQUIRE(y.size() == 400);
    CHECK(fit_model(ModelId::ShiftedPowerLaw, y).r2_log >= 0.99);
  }
}
