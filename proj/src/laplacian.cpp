#include "macrostate/laplacian.hpp"

#include "macrostate/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <utility>

namespace macrostate {

std::string_view to_string(SourceKind kind) {
  switch (kind) {
    case SourceKind::grid: return "grid";
    case SourceKind::items: return "items";
    case SourceKind::graph: return "graph";
  }
  return "unknown";
}

std::string_view to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::gaussian: return "gaussian";
  }
  return "unknown";
}

std::string_view to_string(Normalization norm) {
  switch (norm) {
    case Normalization::unnormalized: return "unnormalized";
    case Normalization::symmetric: return "symmetric";
  }
  return "unknown";
}

KernelKind kernel_from_string(std::string_view name) {
  if (name == "gaussian") return KernelKind::gaussian;
  throw Error(ErrorCode::InvalidArgument, "unknown kernel '" + std::string(name) + "'");
}

Normalization normalization_from_string(std::string_view name) {
  if (name == "unnormalized") return Normalization::unnormalized;
  if (name == "symmetric") return Normalization::symmetric;
  throw Error(ErrorCode::InvalidArgument, "unknown normalization '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Grid shape

Index GridShape::size() const {
  Index n = 1;
  for (Index d : dims) n *= d;
  return n;
}

std::vector<Index> GridShape::strides() const {
  std::vector<Index> s(dims.size(), 1);
  for (int a = static_cast<int>(dims.size()) - 2; a >= 0; --a) s[a] = s[a + 1] * dims[a + 1];
  return s;
}

std::vector<double> GridShape::coordinates(Index j) const {
  const auto s = strides();
  std::vector<double> x(dims.size());
  for (std::size_t a = 0; a < dims.size(); ++a) {
    const Index i = (j / s[a]) % dims[a];
    x[a] = origin[a] + spacing[a] * static_cast<double>(i);
  }
  return x;
}

void GridShape::validate() const {
  if (dims.empty() || dims.size() > 4)
    throw Error(ErrorCode::InvalidArgument, "grid must have between 1 and 4 axes");
  if (spacing.size() != dims.size() || origin.size() != dims.size())
    throw Error(ErrorCode::InvalidArgument, "spacing/origin length must match dims");
  for (std::size_t a = 0; a < dims.size(); ++a) {
    if (dims[a] < 1) throw Error(ErrorCode::InvalidArgument, "grid dims must be positive");
    if (!(spacing[a] > 0.0) || !std::isfinite(spacing[a]))
      throw Error(ErrorCode::InvalidArgument, "grid spacing must be positive and finite");
    if (!std::isfinite(origin[a])) throw Error(ErrorCode::InvalidArgument, "grid origin must be finite");
  }
}

void DensityGrid::validate() const {
  shape.validate();
  if (shape.size() != values.size())
    throw Error(ErrorCode::InvalidArgument, "product(dims) != number of values");
  for (Index j = 0; j < values.size(); ++j) {
    if (!std::isfinite(values[j]) || values[j] < 0.0)
      throw Error(ErrorCode::InvalidArgument, "density values must be finite and nonnegative");
  }
}

void ItemSet::validate() const {
  if (items.rows() < 2) throw Error(ErrorCode::InvalidArgument, "item set needs at least 2 items");
  if (!items.allFinite()) throw Error(ErrorCode::NonFiniteDistance, "item coordinates must be finite");
  if (!ids.empty() && static_cast<Index>(ids.size()) != items.rows())
    throw Error(ErrorCode::InvalidArgument, "ids length must match item count");
}

void GraphSpec::validate() const {
  if (n_nodes < 1) throw Error(ErrorCode::InvalidArgument, "graph has no nodes");
  for (const auto& e : edges) {
    if (e.src < 0 || e.src >= n_nodes || e.dst < 0 || e.dst >= n_nodes)
      throw Error(ErrorCode::InvalidArgument, "edge endpoint out of range");
    if (!std::isfinite(e.weight) || !(e.weight > 0.0))
      throw Error(ErrorCode::InvalidArgument, "edge weights must be finite and positive");
  }
}

double LaplacianSystem::max_abs() const {
  double m = 0.0;
  for (Index k = 0; k < H.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(H, k); it; ++it) m = std::max(m, std::abs(it.value()));
  return m;
}

// ---------------------------------------------------------------------------
// Grid systems

PotentialGrid negative_log_density(const DensityGrid& grid, double floor_ratio) {
  grid.validate();
  if (!(floor_ratio > 0.0 && floor_ratio < 1.0))
    throw Error(ErrorCode::InvalidArgument, "floor_ratio must lie in (0, 1)");
  const double fmax = grid.values.maxCoeff();
  if (!(fmax > 0.0)) throw Error(ErrorCode::AllZeroDensity, "density is zero everywhere");
  const double floor = floor_ratio * fmax;
  PotentialGrid out{grid.shape, Eigen::VectorXd(grid.values.size())};
  for (Index j = 0; j < grid.values.size(); ++j) out.values[j] = -std::log(std::max(grid.values[j], floor));
  return out;
}

namespace {

void check_beta(double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta))
    throw Error(ErrorCode::InvalidArgument, "beta must be positive and finite");
}

// psi0 from log-weights: psi0_j ∝ exp(logw_j / 2), measure = psi0^2.
void set_stationary_state(LaplacianSystem& sys, const Eigen::VectorXd& log_weight) {
  const double top = log_weight.maxCoeff();
  Eigen::VectorXd psi = (0.5 * (log_weight.array() - top)).exp().matrix();
  psi /= psi.norm();
  sys.psi0 = psi;
  sys.measure = psi.array().square().matrix();
  sys.measure /= sys.measure.sum();
}

}  // namespace

LaplacianSystem build_grid_system(const DensityGrid& grid, double beta, double floor_ratio) {
  check_beta(beta);
  const PotentialGrid pot = negative_log_density(grid, floor_ratio);
  const Eigen::VectorXd& V = pot.values;
  const Index n = V.size();
  const auto strides = grid.shape.strides();
  const auto& dims = grid.shape.dims;

  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(n) * (2 * dims.size() + 1));

  for (Index j = 0; j < n; ++j) {
    for (std::size_t a = 0; a < dims.size(); ++a) {
      const double inv_h2 = 1.0 / (grid.shape.spacing[a] * grid.shape.spacing[a]);
      const Index i = (j / strides[a]) % dims[a];
      for (int dir : {-1, 1}) {
        if ((dir < 0 && i == 0) || (dir > 0 && i + 1 == dims[a])) continue;
        const Index k = j + dir * strides[a];
        trip.emplace_back(j, k, inv_h2);
        diag[j] -= inv_h2 * std::exp(-0.5 * beta * (V[k] - V[j]));
      }
    }
  }
  for (Index j = 0; j < n; ++j) trip.emplace_back(j, j, diag[j]);

  LaplacianSystem sys;
  sys.H.resize(n, n);
  sys.H.setFromTriplets(trip.begin(), trip.end());
  sys.beta = beta;
  sys.source_kind = SourceKind::grid;
  sys.node_ids.resize(static_cast<std::size_t>(n));
  std::iota(sys.node_ids.begin(), sys.node_ids.end(), Index{0});
  set_stationary_state(sys, -beta * V);
  return sys;
}

// ---------------------------------------------------------------------------
// Item and graph systems

SimilarityMatrix kernel_similarity(const ItemSet& items, KernelKind kernel, double scale,
                                   double hard_threshold) {
  items.validate();
  if (!(scale > 0.0) || !std::isfinite(scale))
    throw Error(ErrorCode::InvalidArgument, "kernel scale must be positive");
  if (!(hard_threshold >= 0.0 && hard_threshold < 1.0))
    throw Error(ErrorCode::InvalidArgument, "hard_threshold must lie in [0, 1)");

  const Index n = items.size();
  SimilarityMatrix W = SimilarityMatrix::Identity(n, n);
  const double denom = 2.0 * scale * scale;
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      const double d2 = (items.items.row(i) - items.items.row(j)).squaredNorm();
      if (!std::isfinite(d2))
        throw Error(ErrorCode::NonFiniteDistance, "distance between items is not finite");
      double w = 0.0;
      switch (kernel) {
        case KernelKind::gaussian: w = std::exp(-d2 / denom); break;
      }
      if (w < hard_threshold) w = 0.0;
      W(i, j) = w;
      W(j, i) = w;
    }
  }
  return W;
}

std::vector<Index> filter_outliers(const SimilarityMatrix& W, double ratio) {
  if (W.rows() != W.cols()) throw Error(ErrorCode::InvalidArgument, "similarity matrix must be square");
  if (!(ratio > 0.0 && ratio < 1.0)) throw Error(ErrorCode::InvalidArgument, "ratio must lie in (0, 1)");
  std::vector<Index> keep(static_cast<std::size_t>(W.rows()));
  std::iota(keep.begin(), keep.end(), Index{0});

  while (true) {
    const Index n = static_cast<Index>(keep.size());
    if (n == 0) throw Error(ErrorCode::AllItemsRemoved, "outlier filtering removed every item");
    if (n == 1) return keep;
    Eigen::VectorXd mean(n);
    for (Index a = 0; a < n; ++a) {
      double s = 0.0;
      for (Index b = 0; b < n; ++b)
        if (a != b) s += W(keep[a], keep[b]);
      mean[a] = s / static_cast<double>(n - 1);
    }
    const double cut = ratio * mean.mean();
    std::vector<Index> next;
    for (Index a = 0; a < n; ++a)
      if (!(mean[a] < cut)) next.push_back(keep[a]);
    if (next.size() == keep.size()) return keep;
    if (next.empty()) throw Error(ErrorCode::AllItemsRemoved, "outlier filtering removed every item");
    keep = std::move(next);
  }
}

SimilarityMatrix restrict_similarity(const SimilarityMatrix& W, const std::vector<Index>& keep) {
  const Index n = static_cast<Index>(keep.size());
  SimilarityMatrix out(n, n);
  for (Index a = 0; a < n; ++a)
    for (Index b = 0; b < n; ++b) out(a, b) = W(keep[a], keep[b]);
  return out;
}

Index count_components(const SparseMatrix& weights) {
  const Index n = weights.rows();
  std::vector<Index> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), Index{0});
  auto find = [&](Index x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  Index components = n;
  for (Index k = 0; k < weights.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(weights, k); it; ++it) {
      if (it.row() == it.col() || it.value() == 0.0) continue;
      const Index a = find(it.row());
      const Index b = find(it.col());
      if (a != b) {
        parent[std::max(a, b)] = std::min(a, b);
        --components;
      }
    }
  }
  return components;
}

namespace {

// Shared assembly for item and graph inputs. `weights` must be symmetric with
// an empty diagonal and already carry the beta power.
LaplacianSystem build_from_weights(const SparseMatrix& weights, Normalization normalization,
                                   double beta, SourceKind kind) {
  const Index n = weights.rows();
  Eigen::VectorXd degree = Eigen::VectorXd::Zero(n);
  for (Index k = 0; k < weights.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(weights, k); it; ++it) degree[it.row()] += it.value();
  for (Index j = 0; j < n; ++j) {
    if (!(degree[j] > 0.0))
      throw Error(ErrorCode::IsolatedNode, "node " + std::to_string(j) + " has zero total similarity");
  }
  const Index components = count_components(weights);
  if (components > 1)
    throw Error(ErrorCode::DisconnectedInput,
                "input splits into " + std::to_string(components) + " connected components",
                static_cast<long>(components));

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(weights.nonZeros() + n));
  const Eigen::VectorXd inv_sqrt_deg = degree.array().rsqrt().matrix();
  for (Index k = 0; k < weights.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(weights, k); it; ++it) {
      double v = it.value();
      if (normalization == Normalization::symmetric) v *= inv_sqrt_deg[it.row()] * inv_sqrt_deg[it.col()];
      trip.emplace_back(it.row(), it.col(), v);
    }
  }
  for (Index j = 0; j < n; ++j)
    trip.emplace_back(j, j, normalization == Normalization::symmetric ? -1.0 : -degree[j]);

  LaplacianSystem sys;
  sys.H.resize(n, n);
  sys.H.setFromTriplets(trip.begin(), trip.end());
  sys.beta = beta;
  sys.source_kind = kind;
  if (normalization == Normalization::symmetric) {
    sys.psi0 = degree.array().sqrt().matrix();
    sys.psi0 /= sys.psi0.norm();
    sys.measure = degree / degree.sum();
  } else {
    sys.psi0 = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
    sys.measure = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  }
  sys.node_ids.resize(static_cast<std::size_t>(n));
  std::iota(sys.node_ids.begin(), sys.node_ids.end(), Index{0});
  return sys;
}

}  // namespace

LaplacianSystem build_item_system(const SimilarityMatrix& W, Normalization normalization, double beta) {
  check_beta(beta);
  const Index n = W.rows();
  if (n < 2 || W.cols() != n) throw Error(ErrorCode::InvalidArgument, "similarity matrix must be square, N >= 2");
  std::vector<Eigen::Triplet<double>> trip;
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      const double w = W(i, j);
      if (!std::isfinite(w) || w < 0.0)
        throw Error(ErrorCode::InvalidArgument, "similarities must be finite and nonnegative");
      if (std::abs(w - W(j, i)) > 1e-12 * std::max(1.0, std::abs(w)))
        throw Error(ErrorCode::InvalidArgument, "similarity matrix must be symmetric");
      if (i == j || w == 0.0) continue;
      trip.emplace_back(i, j, beta == 1.0 ? w : std::pow(w, beta));
    }
  }
  SparseMatrix weights(n, n);
  weights.setFromTriplets(trip.begin(), trip.end());
  return build_from_weights(weights, normalization, beta, SourceKind::items);
}

LaplacianSystem build_graph_system(const GraphSpec& graph, double beta) {
  check_beta(beta);
  graph.validate();

  // A_sym = A + A^T with self-loops dropped.
  std::map<std::pair<Index, Index>, double> sym;
  for (const auto& e : graph.edges) {
    if (e.src == e.dst) continue;
    sym[{e.src, e.dst}] += e.weight;
    sym[{e.dst, e.src}] += e.weight;
  }
  std::vector<char> has_edge(static_cast<std::size_t>(graph.n_nodes), 0);
  for (const auto& [key, w] : sym) has_edge[key.first] = 1;

  std::vector<Index> kept, dropped;
  std::vector<Index> new_index(static_cast<std::size_t>(graph.n_nodes), -1);
  for (Index v = 0; v < graph.n_nodes; ++v) {
    if (has_edge[v]) {
      new_index[v] = static_cast<Index>(kept.size());
      kept.push_back(v);
    } else {
      dropped.push_back(v);
    }
  }
  if (kept.empty()) throw Error(ErrorCode::EmptyGraphAfterPruning, "no node has a nonzero degree");

  const Index n = static_cast<Index>(kept.size());
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(sym.size());
  for (const auto& [key, w] : sym)
    trip.emplace_back(new_index[key.first], new_index[key.second], beta == 1.0 ? w : std::pow(w, beta));
  SparseMatrix weights(n, n);
  weights.setFromTriplets(trip.begin(), trip.end());

  LaplacianSystem sys = build_from_weights(weights, Normalization::symmetric, beta, SourceKind::graph);
  sys.node_ids = std::move(kept);
  sys.dropped_nodes = std::move(dropped);
  return sys;
}

}  // namespace macrostate
