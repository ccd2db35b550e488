#include "collmem/nonparametric.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <numeric>
#include <thread>

namespace collmem {

std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> rank(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = r;
    i = j + 1;
  }
  return rank;
}

std::vector<double> rank_scale(std::span<const double> values) {
  if (values.size() < 2) throw AnalysisError("rank_scale: need at least two values");
  auto r = average_ranks(values);
  const double d = static_cast<double>(values.size() - 1);
  for (double& x : r) x = (x - 1.0) / d - 0.5;
  return r;
}

double median(std::vector<double> v) {
  if (v.empty()) throw AnalysisError("median of empty sample");
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double hi = v[mid];
  if (v.size() % 2) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw AnalysisError("quantile of empty sample");
  if (!(q >= 0 && q <= 1)) throw AnalysisError("quantile: q outside [0, 1]");
  std::sort(v.begin(), v.end());
  const double h = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

namespace {

struct Signed {
  std::vector<double> ranks;  // of |d|
  std::vector<bool> positive;
  double w = 0;
};

Signed signed_ranks(std::span<const double> diffs) {
  std::vector<double> mag;
  Signed s;
  for (double d : diffs) {
    if (!std::isfinite(d)) throw AnalysisError("wilcoxon: non-finite difference");
    if (d == 0) continue;
    mag.push_back(std::abs(d));
    s.positive.push_back(d > 0);
  }
  if (mag.empty()) throw AnalysisError("wilcoxon: all differences are zero");
  s.ranks = average_ranks(mag);
  for (std::size_t i = 0; i < mag.size(); ++i)
    if (s.positive[i]) s.w += s.ranks[i];
  return s;
}

}  // namespace

WilcoxonResult wilcoxon_exact(std::span<const double> diffs) {
  const Signed s = signed_ranks(diffs);
  const std::size_t n = s.ranks.size();
  if (n > 30) throw AnalysisError("wilcoxon_exact: sample too large for enumeration");
  // Doubled ranks are integers even with ties.
  std::vector<int> r2;
  int total = 0;
  for (double r : s.ranks) {
    r2.push_back(static_cast<int>(std::lround(2 * r)));
    total += r2.back();
  }
  std::vector<double> ways(static_cast<std::size_t>(total) + 1, 0.0);
  ways[0] = 1;
  for (int r : r2)
    for (int v = total; v >= r; --v) ways[v] += ways[v - r];
  const int w2 = static_cast<int>(std::lround(2 * s.w));
  const double all = std::ldexp(1.0, static_cast<int>(n));
  double le = 0, ge = 0;
  for (int v = 0; v <= total; ++v) {
    if (v <= w2) le += ways[v];
    if (v >= w2) ge += ways[v];
  }
  WilcoxonResult out;
  out.w = s.w;
  out.n = n;
  out.exact = true;
  out.p = std::min(1.0, 2.0 * std::min(le, ge) / all);
  return out;
}

WilcoxonResult wilcoxon_normal(std::span<const double> diffs) {
  const Signed s = signed_ranks(diffs);
  const double n = static_cast<double>(s.ranks.size());
  double ties = 0;
  {
    std::vector<double> r = s.ranks;
    std::sort(r.begin(), r.end());
    for (std::size_t i = 0; i < r.size();) {
      std::size_t j = i;
      while (j < r.size() && r[j] == r[i]) ++j;
      const double t = static_cast<double>(j - i);
      ties += t * t * t - t;
      i = j;
    }
  }
  const double mean = n * (n + 1) / 4;
  const double var = n * (n + 1) * (2 * n + 1) / 24 - ties / 48;
  WilcoxonResult out;
  out.w = s.w;
  out.n = s.ranks.size();
  if (!(var > 0)) {
    out.p = 1;
    return out;
  }
  const double dev = std::max(0.0, std::abs(s.w - mean) - 0.5);
  out.z = std::copysign(dev / std::sqrt(var), s.w - mean);
  const boost::math::normal_distribution<> norm;
  out.p = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(norm, std::abs(out.z))));
  return out;
}

WilcoxonResult wilcoxon_signed_rank(std::span<const double> diffs) {
  std::size_t nonzero = 0;
  for (double d : diffs) nonzero += d != 0;
  return nonzero <= kWilcoxonExactMax ? wilcoxon_exact(diffs) : wilcoxon_normal(diffs);
}

Interval bootstrap_median_ci(std::span<const double> values, int replicates, std::uint64_t seed,
                             double level, unsigned threads) {
  if (values.size() < 2) throw AnalysisError("bootstrap_median_ci: need at least two values");
  if (replicates < 1) throw AnalysisError("bootstrap_median_ci: need at least one replicate");
  if (!(level > 0 && level < 1)) throw AnalysisError("bootstrap_median_ci: level outside (0, 1)");
  const std::size_t n = values.size();
  std::vector<double> medians(static_cast<std::size_t>(replicates));
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(replicates));
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w)
      pool.emplace_back([&, w] {
        std::vector<double> sample(n);
        for (std::size_t b = w; b < medians.size(); b += threads) {
          Rng rng(derive_seed(seed, b));
          for (auto& x : sample) x = values[rng.below(n)];
          medians[b] = median(sample);
        }
      });
  }
  const double alpha = 1 - level;
  return {quantile(medians, alpha / 2), quantile(medians, 1 - alpha / 2)};
}

}  // namespace collmem
