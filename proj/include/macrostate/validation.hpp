#pragma once

#include "macrostate/mixture.hpp"

#include <cstdint>
#include <vector>

namespace macrostate {

struct SilhouetteReport {
  Eigen::VectorXd per_point;
  std::vector<int> clusters;        // distinct labels, ascending
  Eigen::VectorXd per_cluster_mean; // aligned with `clusters`
  double overall_mean = 0.0;
};

/// Euclidean silhouette; points in singleton clusters score 0.
SilhouetteReport silhouette(const Eigen::MatrixXd& items, const std::vector<int>& labels);

/// Columns a_a * f_a of a model (n x m).
Eigen::MatrixXd weighted_components(const MacrostateModel& model);

/// min over column permutations of ||estimated - truth_perm||_F / ||truth||_F.
double relative_error(const Eigen::MatrixXd& estimated, const Eigen::MatrixXd& truth);

/// Optimal assignment for a square cost matrix (row -> column).
std::vector<int> hungarian(const Eigen::MatrixXd& cost);

struct KMeansResult {
  std::vector<int> labels;
  Eigen::MatrixXd centroids;
  double wcss = 0.0;
  int restart = 0;
  /// WCSS after each Lloyd iteration of the winning restart.
  std::vector<double> history;
};

KMeansResult kmeans(const Eigen::MatrixXd& items, int k, std::uint64_t seed, int n_init = 10,
                    int max_iter = 300);

inline std::vector<int> kmeans_baseline(const Eigen::MatrixXd& items, int k, std::uint64_t seed,
                                        int n_init = 10) {
  return kmeans(items, k, seed, n_init).labels;
}

}  // namespace macrostate
