#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "collmem/features.hpp"

namespace collmem {

inline constexpr const char* kFeatureNames[4] = {"pre_mean", "short_boost", "long_boost",
                                                 "halving_time"};

struct FeatureMatrix {
  std::vector<std::string> ids;
  Eigen::MatrixXd values;  // rows = persons, columns in kFeatureNames order
};

FeatureMatrix feature_matrix(std::span<const CurveFeatures> features);

// Column-wise z-scores with the population standard deviation. Constant
// columns are centered and left with unit scale.
struct Standardized {
  std::vector<std::string> ids;
  Eigen::MatrixXd z;
  Eigen::RowVectorXd mean;
  Eigen::RowVectorXd scale;

  Eigen::MatrixXd destandardize(const Eigen::MatrixXd& rows) const;
};

Standardized standardize(const FeatureMatrix& m);

struct ClusterResult {
  int k = 0;
  std::vector<int> labels;     // 0-based; label 0 = C1, the largest cluster
  std::vector<int> sizes;      // non-increasing
  Eigen::MatrixXd centroids;   // k x d, same space as the input
  double sse = 0;              // within-cluster sum of squares
  double mean_silhouette = 0;
  int restart = 0;             // index of the winning restart
  std::vector<double> sse_trace;  // per-iteration SSE of the winning restart
};

struct KMeansOptions {
  int restarts = 50;
  int max_iterations = 300;
  unsigned threads = 0;  // 0 = hardware concurrency
};

// Lloyd's algorithm from k-means++ seeds; best of `restarts` by
// (SSE, restart index). Empty clusters are re-seeded with the point farthest
// from its centroid. Clusters are relabeled by decreasing size.
ClusterResult kmeans(const Eigen::MatrixXd& x, int k, std::uint64_t seed,
                     const KMeansOptions& options = {});

// Mean of s(i) = (b(i) - a(i)) / max(a(i), b(i)) with Euclidean distance;
// points in singleton clusters score 0.
double mean_silhouette(const Eigen::MatrixXd& x, std::span<const int> labels);
std::vector<double> silhouettes(const Eigen::MatrixXd& x, std::span<const int> labels);

struct KSelection {
  int best_k = 0;
  std::vector<std::pair<int, double>> curve;  // (k, mean silhouette)
  ClusterResult best;
};

// Maximizes the mean silhouette over k in [k_min, k_max]; ties go to the
// smaller k.
KSelection select_k(const Eigen::MatrixXd& x, int k_min, int k_max, std::uint64_t seed,
                    const KMeansOptions& options = {});

}  // namespace collmem
