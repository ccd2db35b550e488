#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

#include "collmem/clustering.hpp"
#include "collmem/contingency.hpp"

using namespace collmem;
using Eigen::MatrixXd;

namespace {

double naive_silhouette(const MatrixXd& x, const std::vector<int>& labels) {
  const int n = static_cast<int>(x.rows());
  int k = 0;
  for (int l : labels) k = std::max(k, l + 1);
  double total = 0;
  for (int i = 0; i < n; ++i) {
    std::vector<double> sum(k, 0.0);
    std::vector<int> cnt(k, 0);
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      sum[labels[j]] += (x.row(i) - x.row(j)).norm();
      cnt[labels[j]]++;
    }
    if (cnt[labels[i]] == 0) continue;  // singleton
    const double a = sum[labels[i]] / cnt[labels[i]];
    double b = INFINITY;
    for (int c = 0; c < k; ++c)
      if (c != labels[i] && cnt[c] > 0) b = std::min(b, sum[c] / cnt[c]);
    total += (b - a) / std::max(a, b);
  }
  return total / n;
}

// Every non-negative integer table with the given marginals.
void enumerate_tables(const Marginals& rows, const Marginals& cols,
                      const std::function<void(const std::vector<std::vector<std::int64_t>>&)>& visit) {
  const std::size_t r = rows.size(), c = cols.size();
  std::vector<std::vector<std::int64_t>> t(r, std::vector<std::int64_t>(c, 0));
  std::vector<std::int64_t> col_left(cols.begin(), cols.end());
  std::function<void(std::size_t, std::size_t, std::int64_t)> rec = [&](std::size_t i, std::size_t j,
                                                                        std::int64_t row_left) {
    if (i == r) {
      for (auto v : col_left)
        if (v != 0) return;
      visit(t);
      return;
    }
    if (j == c - 1) {
      if (row_left > col_left[j]) return;
      t[i][j] = row_left;
      col_left[j] -= row_left;
      rec(i + 1, 0, i + 1 < r ? rows[i + 1] : 0);
      col_left[j] += row_left;
      return;
    }
    for (std::int64_t v = 0; v <= std::min(row_left, col_left[j]); ++v) {
      t[i][j] = v;
      col_left[j] -= v;
      rec(i, j + 1, row_left - v);
      col_left[j] += v;
    }
  };
  rec(0, 0, rows.empty() ? 0 : rows[0]);
}

TraceBounds brute_bounds(const Marginals& rows, const Marginals& cols) {
  TraceBounds b{INT64_MAX, INT64_MIN};
  enumerate_tables(rows, cols, [&](const auto& t) {
    std::int64_t tr = 0;
    for (std::size_t i = 0; i < std::min(rows.size(), cols.size()); ++i) tr += t[i][i];
    b.min = std::min(b.min, tr);
    b.max = std::max(b.max, tr);
  });
  return b;
}

Marginals random_marginals(std::mt19937_64& gen, int k, std::int64_t n) {
  Marginals m(k, 0);
  for (std::int64_t i = 0; i < n; ++i) m[gen() % k]++;
  return m;
}

MatrixXd blobs(std::mt19937_64& gen, const std::vector<std::vector<double>>& centers, int per,
               double sd) {
  std::normal_distribution<double> noise(0, sd);
  const int d = static_cast<int>(centers[0].size());
  MatrixXd x(per * centers.size(), d);
  for (std::size_t c = 0; c < centers.size(); ++c)
    for (int i = 0; i < per; ++i)
      for (int j = 0; j < d; ++j) x(c * per + i, j) = centers[c][j] + noise(gen);
  return x;
}

}  // namespace

TEST_CASE("standardize uses population scale") {
  FeatureMatrix m;
  m.ids = {"a", "b", "c"};
  m.values = MatrixXd(3, 4);
  m.values << 1, 5, 0, 10, 2, 5, 1, 20, 3, 5, 2, 30;
  auto s = standardize(m);
  CHECK(s.scale(0) == doctest::Approx(std::sqrt(2.0 / 3)));
  CHECK(s.scale(1) == 1.0);
  CHECK(s.z(0, 1) == 0.0);
  CHECK(s.z.col(0).sum() == doctest::Approx(0).epsilon(1e-12));
  CHECK((s.destandardize(s.z) - m.values).norm() < 1e-12);
}

TEST_CASE("k-means basic contracts") {
  MatrixXd x(6, 4);
  x << 10, 0, 0, 0, 10, 0, 0, 0, 10, 0, 0, 0, -10, 0, 0, 0, -10, 0, 0, 0, -10, 0, 0, 0;
  auto r = kmeans(x, 2, 1);
  CHECK(r.sse < 1e-12);
  CHECK(r.labels[0] == r.labels[1]);
  CHECK(r.labels[0] != r.labels[3]);
  CHECK_THROWS(kmeans(x, 1, 1));
  CHECK_THROWS(kmeans(x, 6, 1));

  std::mt19937_64 gen(1);
  auto y = blobs(gen, {{0, 0}, {3, 0}, {0, 3}}, 40, 1.0);
  auto a = kmeans(y, 3, 77), b = kmeans(y, 3, 77);
  CHECK(a.labels == b.labels);
  CHECK(a.sse == b.sse);
  KMeansOptions one;
  one.threads = 1;
  CHECK(kmeans(y, 3, 77, one).labels == a.labels);
}

TEST_CASE("k-means trace, fixed point and size order") {
  std::mt19937_64 gen(6);
  for (int rep = 0; rep < 20; ++rep) {
    auto x = blobs(gen, {{0, 0, 0, 0}, {2, 1, 0, 0}, {0, 2, 2, 0}, {1, 1, 1, 3}}, 25, 1.0);
    const int k = 2 + rep % 5;
    KMeansOptions o;
    o.restarts = 5;
    auto r = kmeans(x, k, rep, o);
    for (std::size_t i = 1; i < r.sse_trace.size(); ++i) CHECK(r.sse_trace[i] <= r.sse_trace[i - 1] + 1e-9);
    for (std::size_t i = 1; i < r.sizes.size(); ++i) CHECK(r.sizes[i] <= r.sizes[i - 1]);
    for (int i = 0; i < x.rows(); ++i) {
      const double own = (x.row(i) - r.centroids.row(r.labels[i])).squaredNorm();
      for (int c = 0; c < k; ++c) CHECK(own <= (x.row(i) - r.centroids.row(c)).squaredNorm() + 1e-9);
    }
    double sse = 0;
    for (int i = 0; i < x.rows(); ++i) sse += (x.row(i) - r.centroids.row(r.labels[i])).squaredNorm();
    CHECK(sse == doctest::Approx(r.sse).epsilon(1e-9));
  }
}

TEST_CASE("relabeling keeps partition membership") {
  std::mt19937_64 gen(12);
  auto x = blobs(gen, {{0, 0}, {5, 0}, {0, 5}}, 10, 0.2);
  auto r = kmeans(x, 3, 3);
  // each planted blob maps to one label and labels are distinct across blobs
  std::set<int> seen;
  for (int c = 0; c < 3; ++c) {
    std::set<int> inside;
    for (int i = 0; i < 10; ++i) inside.insert(r.labels[c * 10 + i]);
    CHECK(inside.size() == 1);
    seen.insert(*inside.begin());
  }
  CHECK(seen.size() == 3);
}

TEST_CASE("silhouette against brute force") {
  std::mt19937_64 gen(3);
  auto x = blobs(gen, {{0, 0}, {20, 20}}, 10, 0.3);
  std::vector<int> lab(20);
  for (int i = 0; i < 20; ++i) lab[i] = i < 10 ? 0 : 1;
  CHECK(mean_silhouette(x, lab) > 0.9);
  CHECK(mean_silhouette(x, lab) == doctest::Approx(naive_silhouette(x, lab)).epsilon(1e-12));

  MatrixXd same = MatrixXd::Zero(8, 2);
  std::vector<int> split{0, 1, 0, 1, 0, 1, 0, 1};
  CHECK(mean_silhouette(same, split) <= 0.0);

  MatrixXd two(2, 2);
  two << 0, 0, 1, 1;
  std::vector<int> pair{0, 1};
  auto s = silhouettes(two, pair);
  CHECK(s == std::vector<double>{0.0, 0.0});

  for (int rep = 0; rep < 30; ++rep) {
    auto y = blobs(gen, {{0, 0, 0}, {1, 1, 1}, {2, 0, 1}}, 6, 1.0);
    std::vector<int> l(y.rows());
    for (int& v : l) v = static_cast<int>(gen() % 4);
    CHECK(mean_silhouette(y, l) == doctest::Approx(naive_silhouette(y, l)).epsilon(1e-12));
  }
}

TEST_CASE("k selection") {
  std::mt19937_64 gen(21);
  auto x = blobs(gen, {{0, 0, 0, 0}, {8, 8, 0, 0}}, 50, 0.5);
  KMeansOptions o;
  o.restarts = 10;
  auto sel = select_k(x, 2, 8, 5, o);
  CHECK(sel.best_k == 2);
  CHECK(sel.curve.size() == 7);

  // identical points score 0 at every k; the tie goes to the smallest k
  MatrixXd y = MatrixXd::Zero(6, 2);
  auto tie = select_k(y, 2, 4, 1, o);
  for (const auto& [k, s] : tie.curve) CHECK(s == 0.0);
  CHECK(tie.best_k == 2);
}

TEST_CASE("confusion matrix") {
  std::vector<std::string> ids{"a", "b", "c", "d"};
  std::vector<int> l{0, 1, 1, 2};
  auto m = confusion(ids, l, 3, ids, l, 3);
  CHECK(m.trace() == 4);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      if (i != j) CHECK(m.counts[i][j] == 0);

  std::vector<std::string> one{"a"};
  std::vector<int> z{0};
  auto m1 = confusion(one, z, 2, one, z, 2);
  CHECK(m1.n() == 1);
  CHECK(m1.counts[0][0] == 1);

  std::vector<std::string> other{"a", "b", "c", "e"};
  CHECK_THROWS(confusion(ids, l, 3, other, l, 3));

  // independent relabeling: trace close to the independence expectation
  std::mt19937_64 gen(8);
  const int n = 20000;
  std::vector<std::string> big(n);
  std::vector<int> la(n), lb(n);
  for (int i = 0; i < n; ++i) {
    big[i] = std::to_string(i);
    la[i] = (gen() % 10) < 6 ? 0 : static_cast<int>(gen() % 4);
    lb[i] = (gen() % 10) < 5 ? 0 : static_cast<int>(gen() % 4);
  }
  auto mb = confusion(big, la, 4, big, lb, 4);
  const double e = expected_trace(mb.row_marginals(), mb.col_marginals());
  CHECK(std::abs(mb.trace() - e) < 4 * std::sqrt(e));
}

TEST_CASE("chi-square independence") {
  ConfusionMatrix flat{{{10, 10}, {10, 10}}};
  auto c0 = chi2_independence(flat);
  CHECK(c0.statistic == 0.0);
  CHECK(c0.p == doctest::Approx(1.0));
  ConfusionMatrix diag{{{20, 0}, {0, 20}}};
  auto c1 = chi2_independence(diag);
  CHECK(c1.statistic == doctest::Approx(40.0).epsilon(1e-14));
  CHECK(c1.dof == 1);
  CHECK(c1.p == doctest::Approx(chi2_upper_tail(40, 1)));
  CHECK(chi2_upper_tail(3.841458820694124, 1) == doctest::Approx(0.05).epsilon(1e-9));

  ConfusionMatrix m{{{5, 3, 1}, {2, 8, 4}, {1, 1, 9}}};
  ConfusionMatrix perm{{{9, 1, 1}, {4, 8, 2}, {1, 3, 5}}};  // rows and cols reversed
  CHECK(chi2_independence(m).statistic == doctest::Approx(chi2_independence(perm).statistic));

  ConfusionMatrix empty_row{{{0, 0}, {3, 4}}};
  CHECK_THROWS(chi2_independence(empty_row));
}

TEST_CASE("trace bounds against enumeration") {
  auto b = trace_bounds({3, 1}, {2, 2});
  CHECK(b.min == 1);
  CHECK(b.max == 3);
  auto eq = trace_bounds({4, 3, 2}, {4, 3, 2});
  CHECK(eq.max == 9);
  CHECK(trace_bounds({10, 0}, {10, 0}).max == 10);
  CHECK(trace_bounds({10, 0}, {10, 0}).min == 10);

  std::mt19937_64 gen(99);
  for (int rep = 0; rep < 200; ++rep) {
    const int k = 2 + rep % 3;
    const std::int64_t n = 1 + static_cast<std::int64_t>(gen() % 18);
    auto r = random_marginals(gen, k, n), c = random_marginals(gen, k, n);
    auto lp = trace_bounds(r, c);
    auto bf = brute_bounds(r, c);
    CHECK(lp.min == bf.min);
    CHECK(lp.max == bf.max);
    std::int64_t sum_min = 0;
    for (int i = 0; i < k; ++i) sum_min += std::min(r[i], c[i]);
    CHECK(lp.max == sum_min);
    const double e = expected_trace(r, c);
    CHECK(lp.min <= e + 1e-9);
    CHECK(e <= lp.max + 1e-9);
  }
}

TEST_CASE("expected trace") {
  CHECK(expected_trace({2, 2}, {2, 2}) == 2.0);
  CHECK(expected_trace({7, 0}, {7, 0}) == 7.0);
}

TEST_CASE("proportions test with continuity correction") {
  CHECK(proportions_test(50, 100, 0.5).statistic == 0.0);
  auto r = proportions_test(60, 100, 0.5);
  CHECK(r.statistic == doctest::Approx(3.61).epsilon(1e-14));
  CHECK(r.dof == 1);
  for (std::int64_t x = 0; x <= 40; ++x) {
    const double diff = std::abs(x - 40 * 0.3);
    const double raw = diff * diff / (40 * 0.3 * 0.7);
    if (diff > 0.5) CHECK(proportions_test(x, 40, 0.3).statistic < raw);
  }
}
