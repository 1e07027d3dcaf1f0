#pragma once

#include "macrostate/spectra.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace macrostate {

/// Feasible set of the coefficient matrix M:
///   M^T e = e_1          (partition of unity, since omega_0 == 1)
///   (M omega(x_j))_a >= 0  for every point j and component a.
///
/// The equalities are eliminated by solving for the last row of M, which
/// leaves p = m (m - 1) free parameters: rows 0..m-2 of M, row-major.
/// Inequality row r = j * m + a is never stored; it is evaluated from omega
/// on demand.
struct MacrostatePolytope {
  int m = 1;
  Eigen::MatrixXd omega;  // n x m, column 0 all ones

  Index points() const { return omega.rows(); }
  Index parameters() const { return static_cast<Index>(m) * (m - 1); }
  Index inequality_rows() const { return points() * m; }

  Eigen::MatrixXd uniform() const;
  Eigen::VectorXd to_parameters(const Eigen::MatrixXd& M) const;
  Eigen::MatrixXd from_parameters(const Eigen::VectorXd& x) const;

  /// Inequality row r written as a^T x <= b.
  void row(Index r, Eigen::Ref<Eigen::VectorXd> a, double& b) const;
  /// Window values w = omega M^T at every point (n x m).
  Eigen::MatrixXd windows(const Eigen::MatrixXd& M) const;
  /// Largest equality residual and most negative window value.
  double equality_residual(const Eigen::MatrixXd& M) const;
  double min_window(const Eigen::MatrixXd& M) const;
  bool feasible(const Eigen::MatrixXd& M, double eq_tol = 1e-9, double ineq_tol = 1e-8) const;
};

MacrostatePolytope build_polytope(const EigenBasis& basis, int m);

/// 1 - ||M||_F^2.
template <typename Derived>
typename Derived::Scalar upsilon(const Eigen::MatrixBase<Derived>& M) {
  return typename Derived::Scalar(1) - M.squaredNorm();
}

struct QPSolution {
  Eigen::MatrixXd M;
  double upsilon = 0.0;
  int start_index = 0;
  int iterations = 0;
  std::vector<Index> active_points;
  double det_abs = 0.0;
  bool converged = true;
  /// Objective after the start and after every accepted step.
  std::vector<double> upsilon_trace;
};

struct TraceEvent {
  int start = 0;
  int iteration = 0;
  double upsilon = 0.0;
  Index violated_rows = 0;
};

struct QPOptions {
  double tol = 1e-9;            // FW acceptance and LP feasibility
  double pivot_tol = 1e-10;
  int max_iter = 1000;          // FW steps per start
  Index batch = 50;             // rows added per generation round
  int max_rounds = 100000;
  unsigned workers = 1;         // 0: one per hardware thread
  std::function<void(const TraceEvent&)> trace;
};

/// Row pool shared by successive LP solves on one polytope. Rows only ever
/// enter the pool; correctness comes from the final full violation sweep.
struct RowPool {
  std::vector<Index> rows;
};

/// Maximizes <objective, M> over the polytope and returns an optimal vertex.
/// `violated` (optional) receives the number of rows generated lazily.
Eigen::MatrixXd solve_lp(const Eigen::MatrixXd& objective, const MacrostatePolytope& polytope,
                         const QPOptions& options = {}, RowPool* pool = nullptr,
                         Index* violated = nullptr);

QPSolution frank_wolfe(const MacrostatePolytope& polytope, const Eigen::MatrixXd& start,
                       const QPOptions& options = {}, int start_index = 0,
                       RowPool* pool = nullptr);

QPSolution multistart_optimize(const MacrostatePolytope& polytope, int n_starts, std::uint64_t seed,
                               const QPOptions& options = {});

/// Every vertex of the polytope (singular ones included), by enumerating
/// square active sets. Guarded to m <= 3 and at most 12 points.
std::vector<Eigen::MatrixXd> enumerate_vertices(const MacrostatePolytope& polytope);

QPSolution enumerate_vertices_bruteforce(const MacrostatePolytope& polytope);

/// Reorders rows so that the weights M(a, 0) are descending.
Eigen::MatrixXd canonical_rows(const Eigen::MatrixXd& M);

}  // namespace macrostate
