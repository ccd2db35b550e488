#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "collmem/common.hpp"

namespace collmem {

using Marginals = std::vector<std::int64_t>;

struct ConfusionMatrix {
  std::vector<std::vector<std::int64_t>> counts;  // rows = first medium, cols = second

  std::size_t rows() const { return counts.size(); }
  std::size_t cols() const { return counts.empty() ? 0 : counts.front().size(); }
  Marginals row_marginals() const;
  Marginals col_marginals() const;
  std::int64_t n() const;
  std::int64_t trace() const;
};

// Entry (i, j) counts persons labeled i by the first assignment and j by the
// second. Both assignments must cover the same person ids.
ConfusionMatrix confusion(std::span<const std::string> ids_a, std::span<const int> labels_a, int k_a,
                          std::span<const std::string> ids_b, std::span<const int> labels_b,
                          int k_b);

struct ChiSquare {
  double statistic = 0;
  int dof = 0;
  double p = 1;
};

ChiSquare chi2_independence(const ConfusionMatrix& m);

struct TraceBounds {
  std::int64_t min = 0;
  std::int64_t max = 0;
};

// Extreme diagonal sums over non-negative integer tables with the given
// marginals, solved as a min-cost transportation problem.
TraceBounds trace_bounds(const Marginals& rows, const Marginals& cols);

// Sum of r_i c_i / n over the diagonal.
double expected_trace(const Marginals& rows, const Marginals& cols);

// One-sample test of a proportion against p0 with continuity correction.
ChiSquare proportions_test(std::int64_t successes, std::int64_t trials, double p0);

double chi2_upper_tail(double statistic, int dof);

}  // namespace collmem
