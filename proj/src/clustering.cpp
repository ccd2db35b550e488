#include "collmem/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

namespace collmem {

FeatureMatrix feature_matrix(std::span<const CurveFeatures> features) {
  FeatureMatrix m;
  m.values.resize(static_cast<Eigen::Index>(features.size()), 4);
  for (std::size_t i = 0; i < features.size(); ++i) {
    const auto& f = features[i];
    m.ids.push_back(f.person_id);
    const auto r = static_cast<Eigen::Index>(i);
    m.values(r, 0) = f.pre_mortem_mean;
    m.values(r, 1) = f.short_term_boost;
    m.values(r, 2) = f.long_term_boost;
    m.values(r, 3) = f.halving_time;
  }
  return m;
}

Standardized standardize(const FeatureMatrix& m) {
  if (m.values.rows() == 0) throw AnalysisError("standardize: empty feature matrix");
  Standardized s;
  s.ids = m.ids;
  s.mean = m.values.colwise().mean();
  s.z = m.values.rowwise() - s.mean;
  s.scale = (s.z.array().square().colwise().sum() / static_cast<double>(m.values.rows())).sqrt();
  for (Eigen::Index j = 0; j < s.scale.size(); ++j) {
    if (!(s.scale[j] > 0)) s.scale[j] = 1.0;
    s.z.col(j) /= s.scale[j];
  }
  return s;
}

Eigen::MatrixXd Standardized::destandardize(const Eigen::MatrixXd& rows) const {
  Eigen::MatrixXd out = rows.array().rowwise() * scale.array();
  return out.rowwise() + mean;
}

namespace {

struct Run {
  std::vector<int> labels;
  Eigen::MatrixXd centroids;
  double sse = std::numeric_limits<double>::infinity();
  std::vector<double> trace;
};

Eigen::MatrixXd seed_plus_plus(const Eigen::MatrixXd& x, int k, Rng& rng) {
  const Eigen::Index n = x.rows();
  Eigen::MatrixXd c(k, x.cols());
  c.row(0) = x.row(static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n))));
  Eigen::VectorXd d2 = (x.rowwise() - c.row(0)).rowwise().squaredNorm();
  for (int j = 1; j < k; ++j) {
    const double total = d2.sum();
    Eigen::Index pick = 0;
    if (total > 0) {
      double u = rng.uniform() * total;
      for (pick = 0; pick < n - 1; ++pick) {
        u -= d2[pick];
        if (u < 0) break;
      }
    } else {
      pick = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)));
    }
    c.row(j) = x.row(pick);
    d2 = d2.cwiseMin((x.rowwise() - c.row(j)).rowwise().squaredNorm());
  }
  return c;
}

Run lloyd(const Eigen::MatrixXd& x, int k, std::uint64_t seed, int max_iter) {
  Rng rng(seed);
  const Eigen::Index n = x.rows();
  Run run;
  run.centroids = seed_plus_plus(x, k, rng);
  run.labels.assign(static_cast<std::size_t>(n), -1);
  Eigen::VectorXd dist(n);

  for (int it = 0; it < max_iter; ++it) {
    bool changed = false;
    double sse = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      int best = 0;
      double bd = std::numeric_limits<double>::infinity();
      for (int j = 0; j < k; ++j) {
        const double d = (x.row(i) - run.centroids.row(j)).squaredNorm();
        if (d < bd) {
          bd = d;
          best = j;
        }
      }
      if (run.labels[i] != best) changed = true;
      run.labels[i] = best;
      dist[i] = bd;
      sse += bd;
    }
    run.trace.push_back(sse);
    if (!changed && it > 0) break;

    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(k, x.cols());
    std::vector<int> count(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      sum.row(run.labels[i]) += x.row(i);
      ++count[run.labels[i]];
    }
    for (int j = 0; j < k; ++j) {
      if (count[j] > 0) {
        run.centroids.row(j) = sum.row(j) / count[j];
        continue;
      }
      // Empty cluster: move the worst-fitting point of a non-singleton cluster.
      Eigen::Index far = -1;
      for (Eigen::Index i = 0; i < n; ++i)
        if (count[run.labels[i]] > 1 && (far < 0 || dist[i] > dist[far])) far = i;
      if (far < 0) continue;
      --count[run.labels[far]];
      sum.row(run.labels[far]) -= x.row(far);
      if (count[run.labels[far]] > 0)
        run.centroids.row(run.labels[far]) = sum.row(run.labels[far]) / count[run.labels[far]];
      run.labels[far] = j;
      count[j] = 1;
      sum.row(j) = x.row(far);
      run.centroids.row(j) = x.row(far);
      dist[far] = 0;
    }
  }
  // Final SSE with the final centroids.
  run.sse = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    run.sse += (x.row(i) - run.centroids.row(run.labels[i])).squaredNorm();
  return run;
}

}  // namespace

ClusterResult kmeans(const Eigen::MatrixXd& x, int k, std::uint64_t seed,
                     const KMeansOptions& options) {
  if (k < 2) throw AnalysisError("kmeans: k must be at least 2");
  if (x.rows() <= k) throw AnalysisError("kmeans: need more points than clusters");
  const int restarts = std::max(1, options.restarts);
  unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(restarts));

  std::vector<Run> runs(static_cast<std::size_t>(restarts));
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w)
      pool.emplace_back([&, w] {
        for (int r = static_cast<int>(w); r < restarts; r += static_cast<int>(threads))
          runs[r] = lloyd(x, k, derive_seed(seed, static_cast<std::uint64_t>(r)),
                          options.max_iterations);
      });
  }
  int win = 0;
  for (int r = 1; r < restarts; ++r)
    if (runs[r].sse < runs[win].sse) win = r;
  Run& best = runs[win];

  // Relabel by decreasing size; ties keep the original order.
  std::vector<int> size(static_cast<std::size_t>(k), 0);
  for (int l : best.labels) ++size[l];
  std::vector<int> order(static_cast<std::size_t>(k));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return size[a] > size[b]; });
  std::vector<int> relabel(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) relabel[order[j]] = j;

  ClusterResult res;
  res.k = k;
  res.restart = win;
  res.sse = best.sse;
  res.sse_trace = best.trace;
  res.centroids.resize(k, x.cols());
  for (int j = 0; j < k; ++j) {
    res.centroids.row(j) = best.centroids.row(order[j]);
    res.sizes.push_back(size[order[j]]);
  }
  res.labels.reserve(best.labels.size());
  for (int l : best.labels) res.labels.push_back(relabel[l]);
  res.mean_silhouette = mean_silhouette(x, res.labels);
  return res;
}

std::vector<double> silhouettes(const Eigen::MatrixXd& x, std::span<const int> labels) {
  const Eigen::Index n = x.rows();
  if (static_cast<std::size_t>(n) != labels.size())
    throw AnalysisError("silhouette: label count does not match rows");
  const int k = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
  std::vector<int> size(static_cast<std::size_t>(k), 0);
  for (int l : labels) ++size[l];

  std::vector<double> s(static_cast<std::size_t>(n), 0.0);
  std::vector<double> sum(static_cast<std::size_t>(k));
  for (Eigen::Index i = 0; i < n; ++i) {
    const int own = labels[i];
    if (size[own] <= 1) continue;
    std::fill(sum.begin(), sum.end(), 0.0);
    for (Eigen::Index j = 0; j < n; ++j)
      if (j != i) sum[labels[j]] += (x.row(i) - x.row(j)).norm();
    const double a = sum[own] / (size[own] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (int c = 0; c < k; ++c)
      if (c != own && size[c] > 0) b = std::min(b, sum[c] / size[c]);
    if (!std::isfinite(b)) continue;
    const double m = std::max(a, b);
    s[i] = m > 0 ? (b - a) / m : 0.0;
  }
  return s;
}

double mean_silhouette(const Eigen::MatrixXd& x, std::span<const int> labels) {
  const auto s = silhouettes(x, labels);
  if (s.empty()) return 0.0;
  return std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
}

KSelection select_k(const Eigen::MatrixXd& x, int k_min, int k_max, std::uint64_t seed,
                    const KMeansOptions& options) {
  if (k_min < 2 || k_max < k_min) throw AnalysisError("select_k: invalid k range");
  if (x.rows() <= k_max) throw AnalysisError("select_k: need more points than the largest k");
  KSelection sel;
  for (int k = k_min; k <= k_max; ++k) {
    ClusterResult r = kmeans(x, k, derive_seed(seed, 1000 + static_cast<std::uint64_t>(k)), options);
    sel.curve.emplace_back(k, r.mean_silhouette);
    if (sel.best_k == 0 || r.mean_silhouette > sel.best.mean_silhouette) {
      sel.best_k = k;
      sel.best = std::move(r);
    }
  }
  return sel;
}

}  // namespace collmem
