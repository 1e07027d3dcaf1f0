#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <string>
#include <string_view>
#include <vector>

namespace macrostate {

using Index = Eigen::Index;
using SparseMatrix = Eigen::SparseMatrix<double>;

/// Axis layout of an evenly spaced grid. Values are stored row-major, so the
/// last axis varies fastest.
struct GridShape {
  std::vector<Index> dims;
  std::vector<double> spacing;
  std::vector<double> origin;

  Index size() const;
  std::vector<Index> strides() const;
  /// Coordinates of flat node `j`.
  std::vector<double> coordinates(Index j) const;
  void validate() const;
};

struct DensityGrid {
  GridShape shape;
  Eigen::VectorXd values;

  void validate() const;
};

/// Same layout as the density grid it came from; values hold V(x_j).
struct PotentialGrid {
  GridShape shape;
  Eigen::VectorXd values;
};

struct ItemSet {
  Eigen::MatrixXd items;  // N x d
  std::vector<std::string> ids;

  Index size() const { return items.rows(); }
  void validate() const;
};

struct Edge {
  Index src = 0;
  Index dst = 0;
  double weight = 1.0;
};

struct GraphSpec {
  Index n_nodes = 0;
  std::vector<Edge> edges;
  bool directed = true;

  void validate() const;
};

enum class SourceKind { grid, items, graph };
enum class KernelKind { gaussian };
enum class Normalization { unnormalized, symmetric };

std::string_view to_string(SourceKind kind);
std::string_view to_string(KernelKind kind);
std::string_view to_string(Normalization norm);
KernelKind kernel_from_string(std::string_view name);
Normalization normalization_from_string(std::string_view name);

/// Symmetrized generator of a reversible Markov process together with its
/// stationary state. Off-diagonals of H are nonnegative and H * psi0 = 0.
struct LaplacianSystem {
  SparseMatrix H;
  Eigen::VectorXd psi0;     // unit 2-norm, strictly positive
  Eigen::VectorXd measure;  // psi0^2, sums to one
  double beta = 1.0;
  SourceKind source_kind = SourceKind::grid;
  /// Original index (grid node, item row or graph node) of each system row.
  std::vector<Index> node_ids;
  /// Graph nodes removed for having zero symmetrized degree.
  std::vector<Index> dropped_nodes;

  Index size() const { return H.rows(); }
  double max_abs() const;
};

using SimilarityMatrix = Eigen::MatrixXd;

PotentialGrid negative_log_density(const DensityGrid& grid, double floor_ratio = 1e-12);

/// Nearest-neighbour discretization of the symmetrized Smoluchowski operator
/// with unit diffusion constant and no-flux boundaries.
LaplacianSystem build_grid_system(const DensityGrid& grid, double beta,
                                  double floor_ratio = 1e-12);

SimilarityMatrix kernel_similarity(const ItemSet& items, KernelKind kernel, double scale,
                                   double hard_threshold = 0.0);

/// Iteratively drops items whose mean off-diagonal similarity falls below
/// `ratio` times the mean over the surviving items. Returns the surviving
/// indices in ascending order.
std::vector<Index> filter_outliers(const SimilarityMatrix& W, double ratio = 0.2);

/// Principal submatrix of W on `keep`.
SimilarityMatrix restrict_similarity(const SimilarityMatrix& W, const std::vector<Index>& keep);

LaplacianSystem build_item_system(const SimilarityMatrix& W, Normalization normalization,
                                  double beta);

LaplacianSystem build_graph_system(const GraphSpec& graph, double beta);

/// Number of connected components of the off-diagonal sparsity pattern.
Index count_components(const SparseMatrix& weights);

}  // namespace macrostate
