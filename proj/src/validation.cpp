#include "macrostate/validation.hpp"

#include "macrostate/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>

namespace macrostate {

SilhouetteReport silhouette(const Eigen::MatrixXd& items, const std::vector<int>& labels) {
  const Index n = items.rows();
  if (static_cast<Index>(labels.size()) != n) throw Error(ErrorCode::InvalidArgument, "one label per item");
  std::map<int, Index> index;
  for (int l : labels) index.emplace(l, 0);
  if (index.size() < 2) throw Error(ErrorCode::SingleClusterInput, "silhouette needs at least two clusters");
  SilhouetteReport rep;
  for (auto& [l, i] : index) {
    i = static_cast<Index>(rep.clusters.size());
    rep.clusters.push_back(l);
  }
  const Index k = static_cast<Index>(rep.clusters.size());
  std::vector<Index> cluster(static_cast<std::size_t>(n));
  Eigen::VectorXd sizes = Eigen::VectorXd::Zero(k);
  for (Index j = 0; j < n; ++j) {
    cluster[static_cast<std::size_t>(j)] = index[labels[static_cast<std::size_t>(j)]];
    sizes[cluster[static_cast<std::size_t>(j)]] += 1.0;
  }

  rep.per_point.resize(n);
  Eigen::VectorXd sums(k);
  for (Index i = 0; i < n; ++i) {
    sums.setZero();
    for (Index j = 0; j < n; ++j)
      if (j != i) sums[cluster[static_cast<std::size_t>(j)]] += (items.row(i) - items.row(j)).norm();
    const Index own = cluster[static_cast<std::size_t>(i)];
    if (sizes[own] <= 1.0) {
      rep.per_point[i] = 0.0;
      continue;
    }
    const double a = sums[own] / (sizes[own] - 1.0);
    double b = std::numeric_limits<double>::infinity();
    for (Index c = 0; c < k; ++c)
      if (c != own) b = std::min(b, sums[c] / sizes[c]);
    const double denom = std::max(a, b);
    rep.per_point[i] = denom > 0.0 ? (b - a) / denom : 0.0;
  }
  rep.per_cluster_mean = Eigen::VectorXd::Zero(k);
  for (Index j = 0; j < n; ++j) rep.per_cluster_mean[cluster[static_cast<std::size_t>(j)]] += rep.per_point[j];
  rep.per_cluster_mean = rep.per_cluster_mean.cwiseQuotient(sizes);
  rep.overall_mean = rep.per_point.mean();
  return rep;
}

Eigen::MatrixXd weighted_components(const MacrostateModel& model) {
  return model.components * model.a.asDiagonal();
}

std::vector<int> hungarian(const Eigen::MatrixXd& cost) {
  // Shortest augmenting path formulation, 1-based potentials.
  const int n = static_cast<int>(cost.rows());
  if (cost.cols() != n) throw Error(ErrorCode::InvalidArgument, "cost matrix must be square");
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> assign(n, -1);
  for (int j = 1; j <= n; ++j) assign[p[j] - 1] = j - 1;
  return assign;
}

double relative_error(const Eigen::MatrixXd& estimated, const Eigen::MatrixXd& truth) {
  if (estimated.cols() != truth.cols())
    throw Error(ErrorCode::ComponentCountMismatch, "estimated and true component counts differ");
  if (estimated.rows() != truth.rows())
    throw Error(ErrorCode::InvalidArgument, "estimated and true point counts differ");
  const int m = static_cast<int>(truth.cols());
  const double denom = truth.norm();
  if (!(denom > 0.0)) throw Error(ErrorCode::InvalidArgument, "truth is identically zero");

  // Squared Frobenius distance separates over columns.
  Eigen::MatrixXd cost(m, m);
  for (int a = 0; a < m; ++a)
    for (int k = 0; k < m; ++k) cost(a, k) = (estimated.col(a) - truth.col(k)).squaredNorm();

  double best = std::numeric_limits<double>::infinity();
  if (m <= 8) {
    std::vector<int> perm(m);
    std::iota(perm.begin(), perm.end(), 0);
    do {
      double s = 0.0;
      for (int a = 0; a < m; ++a) s += cost(a, perm[a]);
      best = std::min(best, s);
    } while (std::next_permutation(perm.begin(), perm.end()));
  } else {
    const auto assign = hungarian(cost);
    best = 0.0;
    for (int a = 0; a < m; ++a) best += cost(a, assign[a]);
  }
  return std::sqrt(std::max(0.0, best)) / denom;
}

namespace {

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

struct Lloyd {
  std::vector<int> labels;
  Eigen::MatrixXd centroids;
  double wcss = 0.0;
  std::vector<double> history;
};

Lloyd run_lloyd(const Eigen::MatrixXd& X, int k, std::mt19937_64& rng, int max_iter) {
  const Index n = X.rows();
  Eigen::MatrixXd C(k, X.cols());
  // k-means++ seeding.
  Eigen::VectorXd d2 = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity());
  Index first = static_cast<Index>(uniform01(rng) * static_cast<double>(n));
  first = std::min(first, n - 1);
  C.row(0) = X.row(first);
  for (int c = 1; c < k; ++c) {
    for (Index j = 0; j < n; ++j) d2[j] = std::min(d2[j], (X.row(j) - C.row(c - 1)).squaredNorm());
    const double total = d2.sum();
    Index pick = 0;
    if (total > 0.0) {
      double r = uniform01(rng) * total;
      pick = n - 1;
      for (Index j = 0; j < n; ++j) {
        if (d2[j] <= 0.0) continue;
        r -= d2[j];
        if (r < 0.0) {
          pick = j;
          break;
        }
      }
      while (d2[pick] <= 0.0 && pick > 0) --pick;
    } else {
      pick = static_cast<Index>(c) % n;
    }
    C.row(c) = X.row(pick);
  }

  Lloyd out;
  out.labels.assign(static_cast<std::size_t>(n), -1);
  for (int it = 0; it < max_iter; ++it) {
    bool changed = false;
    double wcss = 0.0;
    Eigen::VectorXd dist(n);
    for (Index j = 0; j < n; ++j) {
      int best = 0;
      double bd = (X.row(j) - C.row(0)).squaredNorm();
      for (int c = 1; c < k; ++c) {
        const double d = (X.row(j) - C.row(c)).squaredNorm();
        if (d < bd) {
          bd = d;
          best = c;
        }
      }
      dist[j] = bd;
      wcss += bd;
      if (out.labels[static_cast<std::size_t>(j)] != best) {
        out.labels[static_cast<std::size_t>(j)] = best;
        changed = true;
      }
    }
    out.history.push_back(wcss);
    // Update; an empty cluster is re-seeded at the point farthest from its centroid.
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(k, X.cols());
    Eigen::VectorXd count = Eigen::VectorXd::Zero(k);
    for (Index j = 0; j < n; ++j) {
      sum.row(out.labels[static_cast<std::size_t>(j)]) += X.row(j);
      count[out.labels[static_cast<std::size_t>(j)]] += 1.0;
    }
    for (int c = 0; c < k; ++c) {
      if (count[c] > 0.0) {
        C.row(c) = sum.row(c) / count[c];
      } else {
        Index far = 0;
        for (Index j = 1; j < n; ++j)
          if (dist[j] > dist[far]) far = j;
        C.row(c) = X.row(far);
        dist[far] = 0.0;
        changed = true;
      }
    }
    if (!changed) break;
  }
  out.centroids = C;
  out.wcss = 0.0;
  for (Index j = 0; j < n; ++j) out.wcss += (X.row(j) - C.row(out.labels[static_cast<std::size_t>(j)])).squaredNorm();
  return out;
}

}  // namespace

KMeansResult kmeans(const Eigen::MatrixXd& items, int k, std::uint64_t seed, int n_init, int max_iter) {
  if (k < 1 || k > items.rows()) throw Error(ErrorCode::InvalidArgument, "k must lie in [1, N]");
  if (n_init < 1) throw Error(ErrorCode::InvalidArgument, "n_init must be positive");
  KMeansResult best;
  best.wcss = std::numeric_limits<double>::infinity();
  for (int r = 0; r < n_init; ++r) {
    std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(r));
    Lloyd run = run_lloyd(items, k, rng, max_iter);
    if (run.wcss < best.wcss) {
      best.labels = std::move(run.labels);
      best.centroids = std::move(run.centroids);
      best.wcss = run.wcss;
      best.restart = r;
      best.history = std::move(run.history);
    }
  }
  return best;
}

}  // namespace macrostate
