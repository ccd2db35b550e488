#include "collmem/contingency.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

namespace collmem {

Marginals ConfusionMatrix::row_marginals() const {
  Marginals r;
  for (const auto& row : counts) r.push_back(std::accumulate(row.begin(), row.end(), std::int64_t{0}));
  return r;
}

Marginals ConfusionMatrix::col_marginals() const {
  Marginals c(cols(), 0);
  for (const auto& row : counts)
    for (std::size_t j = 0; j < row.size(); ++j) c[j] += row[j];
  return c;
}

std::int64_t ConfusionMatrix::n() const {
  std::int64_t s = 0;
  for (const auto& row : counts) s += std::accumulate(row.begin(), row.end(), std::int64_t{0});
  return s;
}

std::int64_t ConfusionMatrix::trace() const {
  std::int64_t s = 0;
  for (std::size_t i = 0; i < std::min(rows(), cols()); ++i) s += counts[i][i];
  return s;
}

ConfusionMatrix confusion(std::span<const std::string> ids_a, std::span<const int> labels_a, int k_a,
                          std::span<const std::string> ids_b, std::span<const int> labels_b,
                          int k_b) {
  if (ids_a.size() != labels_a.size() || ids_b.size() != labels_b.size())
    throw AnalysisError("confusion: ids and labels differ in length");
  if (ids_a.size() != ids_b.size())
    throw AnalysisError("confusion: assignments cover different numbers of persons");
  std::unordered_map<std::string_view, int> second;
  for (std::size_t i = 0; i < ids_b.size(); ++i)
    if (!second.emplace(ids_b[i], labels_b[i]).second)
      throw AnalysisError("confusion: duplicate person " + ids_b[i]);
  ConfusionMatrix m;
  m.counts.assign(static_cast<std::size_t>(k_a), std::vector<std::int64_t>(static_cast<std::size_t>(k_b), 0));
  for (std::size_t i = 0; i < ids_a.size(); ++i) {
    auto it = second.find(ids_a[i]);
    if (it == second.end()) throw AnalysisError("confusion: person missing in second assignment: " + ids_a[i]);
    const int a = labels_a[i], b = it->second;
    if (a < 0 || a >= k_a || b < 0 || b >= k_b) throw AnalysisError("confusion: label out of range");
    ++m.counts[a][b];
    second.erase(it);  // also catches duplicates in ids_a
  }
  return m;
}

double chi2_upper_tail(double statistic, int dof) {
  if (dof <= 0) throw AnalysisError("chi-square: degrees of freedom must be positive");
  if (statistic <= 0) return 1.0;
  boost::math::chi_squared dist(dof);
  return boost::math::cdf(boost::math::complement(dist, statistic));
}

ChiSquare chi2_independence(const ConfusionMatrix& m) {
  const auto r = m.row_marginals();
  const auto c = m.col_marginals();
  const double n = static_cast<double>(m.n());
  if (r.size() < 2 || c.size() < 2) throw AnalysisError("chi2_independence: need at least a 2x2 table");
  for (auto v : r)
    if (v <= 0) throw AnalysisError("chi2_independence: zero row marginal");
  for (auto v : c)
    if (v <= 0) throw AnalysisError("chi2_independence: zero column marginal");
  ChiSquare out;
  for (std::size_t i = 0; i < r.size(); ++i)
    for (std::size_t j = 0; j < c.size(); ++j) {
      const double e = static_cast<double>(r[i]) * static_cast<double>(c[j]) / n;
      const double d = static_cast<double>(m.counts[i][j]) - e;
      out.statistic += d * d / e;
    }
  out.dof = static_cast<int>((r.size() - 1) * (c.size() - 1));
  out.p = chi2_upper_tail(out.statistic, out.dof);
  return out;
}

namespace {

// Successive shortest paths with Bellman-Ford; graphs here have at most a
// few dozen nodes.
class MinCostFlow {
 public:
  explicit MinCostFlow(int nodes) : adj_(static_cast<std::size_t>(nodes)) {}

  void add_edge(int from, int to, std::int64_t cap, std::int64_t cost) {
    adj_[from].push_back(static_cast<int>(edges_.size()));
    edges_.push_back({to, cap, cost});
    adj_[to].push_back(static_cast<int>(edges_.size()));
    edges_.push_back({from, 0, -cost});
  }

  std::pair<std::int64_t, std::int64_t> solve(int s, int t) {
    const auto n = adj_.size();
    constexpr auto kInf = std::numeric_limits<std::int64_t>::max() / 4;
    std::int64_t flow = 0, cost = 0;
    while (true) {
      std::vector<std::int64_t> dist(n, kInf);
      std::vector<int> via(n, -1);
      dist[s] = 0;
      for (std::size_t round = 0; round < n; ++round) {
        bool updated = false;
        for (std::size_t u = 0; u < n; ++u) {
          if (dist[u] == kInf) continue;
          for (int e : adj_[u]) {
            const auto& ed = edges_[e];
            if (ed.cap > 0 && dist[u] + ed.cost < dist[ed.to]) {
              dist[ed.to] = dist[u] + ed.cost;
              via[ed.to] = e;
              updated = true;
            }
          }
        }
        if (!updated) break;
      }
      if (dist[t] == kInf) break;
      std::int64_t push = kInf;
      for (int v = t; v != s; v = edges_[via[v] ^ 1].to) push = std::min(push, edges_[via[v]].cap);
      for (int v = t; v != s; v = edges_[via[v] ^ 1].to) {
        edges_[via[v]].cap -= push;
        edges_[via[v] ^ 1].cap += push;
      }
      flow += push;
      cost += push * dist[t];
    }
    return {flow, cost};
  }

 private:
  struct Edge {
    int to;
    std::int64_t cap;
    std::int64_t cost;
  };
  std::vector<std::vector<int>> adj_;
  std::vector<Edge> edges_;
};

std::int64_t extreme_trace(const Marginals& rows, const Marginals& cols, int sign) {
  const int R = static_cast<int>(rows.size()), C = static_cast<int>(cols.size());
  const int s = R + C, t = R + C + 1;
  MinCostFlow g(R + C + 2);
  for (int i = 0; i < R; ++i) g.add_edge(s, i, rows[i], 0);
  for (int j = 0; j < C; ++j) g.add_edge(R + j, t, cols[j], 0);
  const std::int64_t n = std::accumulate(rows.begin(), rows.end(), std::int64_t{0});
  for (int i = 0; i < R; ++i)
    for (int j = 0; j < C; ++j) g.add_edge(i, R + j, n, i == j ? sign : 0);
  const auto [flow, cost] = g.solve(s, t);
  if (flow != n) throw AnalysisError("trace_bounds: transportation problem infeasible");
  return sign * cost;
}

void check_marginals(const Marginals& rows, const Marginals& cols) {
  if (rows.empty() || cols.empty()) throw AnalysisError("trace bounds: empty marginals");
  for (auto v : rows)
    if (v < 0) throw AnalysisError("trace bounds: negative marginal");
  for (auto v : cols)
    if (v < 0) throw AnalysisError("trace bounds: negative marginal");
  if (std::accumulate(rows.begin(), rows.end(), std::int64_t{0}) !=
      std::accumulate(cols.begin(), cols.end(), std::int64_t{0}))
    throw AnalysisError("trace bounds: row and column totals differ");
}

}  // namespace

TraceBounds trace_bounds(const Marginals& rows, const Marginals& cols) {
  check_marginals(rows, cols);
  return {extreme_trace(rows, cols, +1), extreme_trace(rows, cols, -1)};
}

double expected_trace(const Marginals& rows, const Marginals& cols) {
  check_marginals(rows, cols);
  const double n = static_cast<double>(std::accumulate(rows.begin(), rows.end(), std::int64_t{0}));
  if (n == 0) return 0.0;
  double s = 0;
  for (std::size_t i = 0; i < std::min(rows.size(), cols.size()); ++i)
    s += static_cast<double>(rows[i]) * static_cast<double>(cols[i]);
  return s / n;
}

ChiSquare proportions_test(std::int64_t successes, std::int64_t trials, double p0) {
  if (trials <= 0) throw AnalysisError("proportions_test: trials must be positive");
  if (successes < 0 || successes > trials) throw AnalysisError("proportions_test: successes out of range");
  if (!(p0 > 0 && p0 < 1)) throw AnalysisError("proportions_test: p0 must lie in (0, 1)");
  const double n = static_cast<double>(trials);
  const double diff = std::max(0.0, std::abs(static_cast<double>(successes) - n * p0) - 0.5);
  ChiSquare out;
  out.dof = 1;
  out.statistic = diff * diff / (n * p0 * (1 - p0));
  out.p = chi2_upper_tail(out.statistic, 1);
  return out;
}

}  // namespace collmem
