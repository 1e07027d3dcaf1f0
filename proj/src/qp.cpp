#include "macrostate/qp.hpp"

#include "macrostate/error.hpp"

#include <Eigen/LU>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <thread>

namespace macrostate {

// ---------------------------------------------------------------------------
// Polytope

Eigen::MatrixXd MacrostatePolytope::uniform() const {
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m, m);
  M.col(0).setConstant(1.0 / m);
  return M;
}

Eigen::VectorXd MacrostatePolytope::to_parameters(const Eigen::MatrixXd& M) const {
  Eigen::VectorXd x(parameters());
  for (int a = 0; a + 1 < m; ++a)
    for (int i = 0; i < m; ++i) x[a * m + i] = M(a, i);
  return x;
}

Eigen::MatrixXd MacrostatePolytope::from_parameters(const Eigen::VectorXd& x) const {
  Eigen::MatrixXd M(m, m);
  for (int i = 0; i < m; ++i) {
    double last = (i == 0) ? 1.0 : 0.0;
    for (int a = 0; a + 1 < m; ++a) {
      M(a, i) = x[a * m + i];
      last -= x[a * m + i];
    }
    M(m - 1, i) = last;
  }
  return M;
}

void MacrostatePolytope::row(Index r, Eigen::Ref<Eigen::VectorXd> a, double& b) const {
  const Index j = r / m;
  const int comp = static_cast<int>(r % m);
  a.setZero();
  if (comp + 1 < m) {
    // -w_comp(j) <= 0
    for (int i = 0; i < m; ++i) a[comp * m + i] = -omega(j, i);
    b = 0.0;
  } else {
    // w_last(j) = 1 - sum_a M_a . omega_j >= 0
    for (int c = 0; c + 1 < m; ++c)
      for (int i = 0; i < m; ++i) a[c * m + i] = omega(j, i);
    b = 1.0;
  }
}

Eigen::MatrixXd MacrostatePolytope::windows(const Eigen::MatrixXd& M) const {
  return omega * M.transpose();
}

double MacrostatePolytope::equality_residual(const Eigen::MatrixXd& M) const {
  Eigen::VectorXd target = Eigen::VectorXd::Zero(m);
  target[0] = 1.0;
  return (M.colwise().sum().transpose() - target).cwiseAbs().maxCoeff();
}

double MacrostatePolytope::min_window(const Eigen::MatrixXd& M) const {
  return windows(M).minCoeff();
}

bool MacrostatePolytope::feasible(const Eigen::MatrixXd& M, double eq_tol, double ineq_tol) const {
  return M.rows() == m && M.cols() == m && equality_residual(M) <= eq_tol && min_window(M) >= -ineq_tol;
}

MacrostatePolytope build_polytope(const EigenBasis& basis, int m) {
  if (m < 1 || m > basis.size())
    throw Error(ErrorCode::InvalidArgument, "m must lie in [1, basis size]");
  MacrostatePolytope P;
  P.m = m;
  P.omega = basis.omega.leftCols(m);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(P.omega);
  qr.setThreshold(1e-10);
  if (qr.rank() < m)
    throw Error(ErrorCode::RankDeficientBasis, "omega has rank " + std::to_string(qr.rank()) + " < m");
  return P;
}

Eigen::MatrixXd canonical_rows(const Eigen::MatrixXd& M) {
  std::vector<Index> order(static_cast<std::size_t>(M.rows()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    for (Index i = 0; i < M.cols(); ++i) {
      const double x = M(a, i), y = M(b, i);
      if (std::abs(x - y) > 1e-12) return x > y;
    }
    return false;
  });
  Eigen::MatrixXd out(M.rows(), M.cols());
  for (Index r = 0; r < M.rows(); ++r) out.row(r) = M.row(order[r]);
  return out;
}

// ---------------------------------------------------------------------------
// LP: active-set primal simplex on the inequality form
//   maximize c^T x  subject to  a_r^T x <= b_r,
// with lazily generated point rows and implied box rows that keep every
// working-set LP bounded.

namespace {

std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double unit_from(std::uint64_t& state) {
  state = mix(state);
  return static_cast<double>(state >> 11) * 0x1.0p-53 * 2.0 - 1.0;
}

// Every feasible M satisfies |M(a, i)| <= sum_j |G(i, j)| with
// G = (Omega^T Omega)^{-1} Omega^T, since the windows lie in [0, 1].
Eigen::VectorXd box_bounds(const MacrostatePolytope& P) {
  const Eigen::MatrixXd G =
      (P.omega.transpose() * P.omega).ldlt().solve(P.omega.transpose());
  Eigen::VectorXd per_col = G.cwiseAbs().rowwise().sum();
  Eigen::VectorXd box(P.parameters());
  for (int a = 0; a + 1 < P.m; ++a)
    for (int i = 0; i < P.m; ++i) box[a * P.m + i] = 2.0 * per_col[i] + 1.0;
  return box;
}

class ActiveSetLP {
 public:
  ActiveSetLP(const MacrostatePolytope& P, const Eigen::VectorXd& box, const QPOptions& opt)
      : P_(P), box_(box), opt_(opt), p_(P.parameters()) {}

  // Loads the working rows: box rows first (ids >= point rows), then pool rows.
  void load(const std::vector<Index>& point_rows) {
    const Index nbox = 2 * p_;
    const Index total = nbox + static_cast<Index>(point_rows.size());
    A_.resize(total, p_);
    b_.resize(total);
    ids_.resize(static_cast<std::size_t>(total));
    Eigen::VectorXd a(p_);
    Index r = 0;
    for (Index pr : point_rows) {
      double b = 0.0;
      P_.row(pr, a, b);
      const double norm = a.norm();
      if (norm == 0.0) continue;  // 0 <= b with b >= 0: vacuous
      A_.row(r) = a.transpose() / norm;
      b_[r] = b / norm;
      ids_[static_cast<std::size_t>(r)] = pr;
      ++r;
    }
    const Index base = P_.inequality_rows();
    for (Index k = 0; k < p_; ++k) {
      A_.row(r).setZero();
      A_(r, k) = 1.0;
      b_[r] = box_[k];
      ids_[static_cast<std::size_t>(r)] = base + 2 * k;
      ++r;
      A_.row(r).setZero();
      A_(r, k) = -1.0;
      b_[r] = box_[k];
      ids_[static_cast<std::size_t>(r)] = base + 2 * k + 1;
      ++r;
    }
    A_.conservativeResize(r, p_);
    b_.conservativeResize(r);
    ids_.resize(static_cast<std::size_t>(r));
    // Bland's rule needs a fixed row order; sort working rows by id.
    std::vector<Index> order(static_cast<std::size_t>(r));
    std::iota(order.begin(), order.end(), Index{0});
    std::sort(order.begin(), order.end(), [&](Index x, Index y) { return ids_[x] < ids_[y]; });
    Eigen::MatrixXd A2(r, p_);
    Eigen::VectorXd b2(r);
    std::vector<Index> ids2(static_cast<std::size_t>(r));
    for (Index i = 0; i < r; ++i) {
      A2.row(i) = A_.row(order[i]);
      b2[i] = b_[order[i]];
      ids2[static_cast<std::size_t>(i)] = ids_[order[i]];
    }
    A_ = std::move(A2);
    b_ = std::move(b2);
    ids_ = std::move(ids2);
  }

  Eigen::VectorXd solve(const Eigen::VectorXd& c, const Eigen::VectorXd& x0) {
    x_ = x0;
    basis_.clear();
    in_basis_.assign(static_cast<std::size_t>(A_.rows()), 0);
    crash(c);
    iterate(c);
    return x_;
  }

 private:
  // Blocking row along d from x_. Rows whose pivot is small relative to d
  // never block. Among rows tied at the minimum ratio, the lowest working
  // index wins among those whose pivot is within a factor 10 of the largest.
  Index ratio_test(const Eigen::VectorXd& d, double& step) const {
    const Eigen::VectorXd ad = A_ * d;
    const double floor = opt_.pivot_tol * std::max(1.0, d.cwiseAbs().maxCoeff()) * 10.0;
    std::vector<std::pair<Index, double>> cand;
    double tmin = std::numeric_limits<double>::infinity();
    for (Index r = 0; r < A_.rows(); ++r) {
      if (in_basis_[static_cast<std::size_t>(r)] || !(ad[r] > floor)) continue;
      const double slack = std::max(0.0, b_[r] - A_.row(r).dot(x_));
      const double t = slack / ad[r];
      cand.emplace_back(r, t);
      tmin = std::min(tmin, t);
    }
    step = 0.0;
    if (cand.empty()) return -1;
    const double tie = tmin + 1e-12 * (1.0 + std::abs(tmin));
    double big = 0.0;
    for (const auto& [r, t] : cand)
      if (t <= tie) big = std::max(big, ad[r]);
    for (const auto& [r, t] : cand) {
      if (t <= tie && ad[r] >= 0.1 * big) {
        step = tmin;
        return r;
      }
    }
    return -1;
  }

  void crash(const Eigen::VectorXd& c) {
    while (static_cast<Index>(basis_.size()) < p_) {
      Eigen::MatrixXd Q;
      if (!basis_.empty()) {
        Eigen::MatrixXd AB(p_, static_cast<Index>(basis_.size()));
        for (std::size_t i = 0; i < basis_.size(); ++i) AB.col(static_cast<Index>(i)) = A_.row(basis_[i]).transpose();
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(AB);
        Q = qr.householderQ() * Eigen::MatrixXd::Identity(p_, AB.cols());
      }
      auto project = [&](const Eigen::VectorXd& v) {
        if (Q.size() == 0) return Eigen::VectorXd(v);
        return Eigen::VectorXd(v - Q * (Q.transpose() * v));
      };
      Eigen::VectorXd d = project(c);
      if (!(d.norm() > 1e-12 * std::max(1.0, c.norm()))) {
        d.setZero();
        for (Index k = 0; k < p_; ++k) {
          Eigen::VectorXd e = Eigen::VectorXd::Unit(p_, k);
          d = project(e);
          if (d.norm() > 1e-6) break;
        }
      }
      d.normalize();
      double step = 0.0;
      const Index s = ratio_test(d, step);
      if (s < 0) throw Error(ErrorCode::LPInfeasible, "working LP is unbounded");
      x_ += step * d;
      basis_.push_back(s);
      in_basis_[static_cast<std::size_t>(s)] = 1;
    }
    if (p_ > 0) refresh_vertex();
  }

  void refresh_vertex() {
    Eigen::MatrixXd AB(p_, p_);
    Eigen::VectorXd bB(p_);
    for (Index i = 0; i < p_; ++i) {
      AB.row(i) = A_.row(basis_[static_cast<std::size_t>(i)]);
      bB[i] = b_[basis_[static_cast<std::size_t>(i)]];
    }
    lu_.compute(AB);
    x_ = lu_.solve(bB);
  }

  void iterate(const Eigen::VectorXd& c) {
    if (p_ == 0) return;
    const double opt_tol = 1e-10 * std::max(1e-300, c.cwiseAbs().maxCoeff());
    for (long it = 0; it < 1000000; ++it) {
      const Eigen::VectorXd lambda = lu_.transpose().solve(c);
      // Bland: leaving row with the smallest working index.
      Index pos = -1;
      for (Index i = 0; i < p_; ++i) {
        if (lambda[i] < -opt_tol &&
            (pos < 0 || basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(pos)]))
          pos = i;
      }
      if (pos < 0) return;
      const Eigen::VectorXd d = lu_.solve(-Eigen::VectorXd::Unit(p_, pos));
      double step = 0.0;
      const Index s = ratio_test(d, step);
      if (s < 0) throw Error(ErrorCode::LPInfeasible, "working LP is unbounded");
      in_basis_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(pos)])] = 0;
      basis_[static_cast<std::size_t>(pos)] = s;
      in_basis_[static_cast<std::size_t>(s)] = 1;
      refresh_vertex();
    }
    throw Error(ErrorCode::LPInfeasible, "simplex iteration limit reached");
  }

  const MacrostatePolytope& P_;
  const Eigen::VectorXd& box_;
  const QPOptions& opt_;
  Index p_;
  Eigen::MatrixXd A_;
  Eigen::VectorXd b_;
  std::vector<Index> ids_;
  Eigen::VectorXd x_;
  std::vector<Index> basis_;
  std::vector<char> in_basis_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

Eigen::VectorXd reduced_objective(const MacrostatePolytope& P, const Eigen::MatrixXd& C) {
  Eigen::VectorXd c(P.parameters());
  for (int a = 0; a + 1 < P.m; ++a)
    for (int i = 0; i < P.m; ++i) c[a * P.m + i] = C(a, i) - C(P.m - 1, i);
  return c;
}

std::vector<Index> binding_points(const MacrostatePolytope& P, const Eigen::MatrixXd& M, double tol) {
  const Eigen::MatrixXd W = P.windows(M);
  std::vector<Index> out;
  for (Index j = 0; j < W.rows(); ++j)
    if (W.row(j).minCoeff() <= tol) out.push_back(j);
  return out;
}

}  // namespace

Eigen::MatrixXd solve_lp(const Eigen::MatrixXd& objective, const MacrostatePolytope& polytope,
                         const QPOptions& options, RowPool* pool, Index* violated) {
  const int m = polytope.m;
  if (objective.rows() != m || objective.cols() != m)
    throw Error(ErrorCode::InvalidArgument, "objective must be m x m");
  if (violated) *violated = 0;
  if (m == 1) return Eigen::MatrixXd::Ones(1, 1);

  RowPool local;
  RowPool& rows = pool ? *pool : local;
  const Eigen::VectorXd box = box_bounds(polytope);
  const Eigen::VectorXd c = reduced_objective(polytope, objective);
  const Eigen::VectorXd x0 = polytope.to_parameters(polytope.uniform());
  ActiveSetLP lp(polytope, box, options);

  for (int round = 0; round < options.max_rounds; ++round) {
    lp.load(rows.rows);
    const Eigen::VectorXd x = lp.solve(c, x0);
    const Eigen::MatrixXd M = polytope.from_parameters(x);
    const Eigen::MatrixXd W = polytope.windows(M);

    std::vector<std::pair<double, Index>> bad;
    for (Index j = 0; j < W.rows(); ++j)
      for (int a = 0; a < m; ++a)
        if (W(j, a) < -options.tol) bad.emplace_back(W(j, a), j * m + a);
    if (bad.empty()) return M;

    std::sort(bad.begin(), bad.end());  // most violated first, then lowest row
    const std::size_t take = std::min<std::size_t>(bad.size(), static_cast<std::size_t>(options.batch));
    std::set<Index> have(rows.rows.begin(), rows.rows.end());
    std::size_t added = 0;
    for (std::size_t i = 0; i < take; ++i)
      if (have.insert(bad[i].second).second) ++added;
    if (added == 0) throw Error(ErrorCode::LPInfeasible, "violated rows already in the working set");
    rows.rows.assign(have.begin(), have.end());
    if (violated) *violated += static_cast<Index>(added);
  }
  throw Error(ErrorCode::MaxRowGenerationRounds, "row generation did not terminate");
}

namespace {

// Frank-Wolfe ascent of ||M||^2. `path` (optional) receives every iterate,
// the start included.
QPSolution ascend(const MacrostatePolytope& polytope, const Eigen::MatrixXd& start,
                  const QPOptions& options, int start_index, RowPool* pool,
                  std::vector<Eigen::MatrixXd>* path) {
  if (!polytope.feasible(start)) throw Error(ErrorCode::InvalidArgument, "frank_wolfe start is infeasible");
  RowPool local;
  RowPool& rows = pool ? *pool : local;

  QPSolution sol;
  sol.M = start;
  if (path) path->push_back(start);
  sol.start_index = start_index;
  sol.upsilon_trace.push_back(upsilon(sol.M));
  sol.converged = false;
  for (int it = 0; it < options.max_iter; ++it) {
    Index violated = 0;
    const Eigen::MatrixXd s = solve_lp(sol.M, polytope, options, &rows, &violated);
    if (s.squaredNorm() > sol.M.squaredNorm() + options.tol) {
      sol.M = s;
      if (path) path->push_back(s);
      ++sol.iterations;
      sol.upsilon_trace.push_back(upsilon(sol.M));
      if (options.trace) options.trace({start_index, sol.iterations, sol.upsilon_trace.back(), violated});
    } else {
      sol.converged = true;
      break;
    }
  }
  sol.upsilon = upsilon(sol.M);
  sol.det_abs = std::abs(sol.M.determinant());
  sol.active_points = binding_points(polytope, sol.M, options.tol);
  return sol;
}

}  // namespace

QPSolution frank_wolfe(const MacrostatePolytope& polytope, const Eigen::MatrixXd& start,
                       const QPOptions& options, int start_index, RowPool* pool) {
  return ascend(polytope, start, options, start_index, pool, nullptr);
}

namespace {

bool better(const QPSolution& a, const QPSolution& b) {
  const double na = a.M.squaredNorm(), nb = b.M.squaredNorm();
  if (na > nb + 1e-9) return true;
  if (nb > na + 1e-9) return false;
  if (a.det_abs != b.det_abs) return a.det_abs > b.det_abs;
  return a.start_index < b.start_index;
}

QPSolution finish(QPSolution sol, const MacrostatePolytope& P, double tol) {
  sol.M = canonical_rows(sol.M);
  sol.upsilon = upsilon(sol.M);
  sol.det_abs = std::abs(sol.M.determinant());
  sol.active_points = binding_points(P, sol.M, tol);
  return sol;
}

// M is treated as invertible only when its smallest singular value clears
// this floor; a component whose row is O(1e-8) is a vanished component.
constexpr double kMinSingular = 1e-6;

bool full_rank(const Eigen::MatrixXd& M) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
  return svd.singularValues().minCoeff() >= kMinSingular;
}

}  // namespace

QPSolution multistart_optimize(const MacrostatePolytope& polytope, int n_starts, std::uint64_t seed,
                               const QPOptions& options) {
  if (n_starts < 1) throw Error(ErrorCode::InvalidArgument, "n_starts must be at least 1");
  const int m = polytope.m;
  std::vector<QPSolution> results(static_cast<std::size_t>(n_starts));
  std::vector<std::string> failures(static_cast<std::size_t>(n_starts));

  auto run_start = [&](int s) {
    try {
      RowPool pool;
      Eigen::MatrixXd start = polytope.uniform();
      if (s > 0) {
        std::uint64_t state = mix(seed ^ mix(static_cast<std::uint64_t>(s)));
        // Column 0 stays zero: every single-component vertex e_a e_1^T then
        // scores 0, so the random vertex is not biased toward them.
        Eigen::MatrixXd C = Eigen::MatrixXd::Zero(m, m);
        for (int a = 0; a < m; ++a)
          for (int i = 1; i < m; ++i) C(a, i) = unit_from(state);
        start = solve_lp(C, polytope, options, &pool);
      }
      std::vector<Eigen::MatrixXd> path;
      QPSolution run = ascend(polytope, start, options, s, &pool, &path);
      // A run that climbs onto a singular vertex is represented by its last
      // invertible iterate, so the candidate stays inside GL(m).
      std::size_t keep = path.size();
      while (keep > 0 && !full_rank(path[keep - 1])) --keep;
      if (keep > 0 && keep < path.size()) {
        run.M = path[keep - 1];
        run.iterations = static_cast<int>(keep - 1);
        run.upsilon_trace.resize(keep);
        run.upsilon = upsilon(run.M);
        run.det_abs = std::abs(run.M.determinant());
      }
      results[static_cast<std::size_t>(s)] = std::move(run);
    } catch (const std::exception& e) {
      failures[static_cast<std::size_t>(s)] = e.what();
    }
  };

  unsigned workers = options.workers ? options.workers : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(n_starts));
  if (workers <= 1) {
    for (int s = 0; s < n_starts; ++s) run_start(s);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (int s = static_cast<int>(w); s < n_starts; s += static_cast<int>(workers)) run_start(s);
      });
    for (auto& t : pool) t.join();
  }
  if (!failures[0].empty()) throw std::runtime_error(failures[0]);

  const QPSolution* best = nullptr;
  for (int s = 0; s < n_starts; ++s) {
    if (!failures[static_cast<std::size_t>(s)].empty()) continue;
    const QPSolution& r = results[static_cast<std::size_t>(s)];
    if (!full_rank(r.M)) continue;
    if (!best || better(r, *best)) best = &r;
  }
  if (!best)
    throw Error(ErrorCode::DegenerateOptimum,
                "every start ended at a singular M; try a smaller m");
  return finish(*best, polytope, options.tol);
}

std::vector<Eigen::MatrixXd> enumerate_vertices(const MacrostatePolytope& polytope) {
  if (polytope.m > 3 || polytope.points() > 12)
    throw Error(ErrorCode::TooLargeForOracle, "vertex enumeration is limited to m <= 3 and 12 points");
  const Index p = polytope.parameters();
  if (p == 0) return {Eigen::MatrixXd::Ones(1, 1)};

  const Index R = polytope.inequality_rows();
  Eigen::MatrixXd A(R, p);
  Eigen::VectorXd b(R);
  Eigen::VectorXd a(p);
  for (Index r = 0; r < R; ++r) {
    double br = 0.0;
    polytope.row(r, a, br);
    A.row(r) = a.transpose();
    b[r] = br;
  }

  std::vector<Eigen::MatrixXd> found;
  std::vector<Index> pick(static_cast<std::size_t>(p));
  std::iota(pick.begin(), pick.end(), Index{0});
  Eigen::MatrixXd S(p, p);
  Eigen::VectorXd rhs(p);
  while (true) {
    for (Index i = 0; i < p; ++i) {
      S.row(i) = A.row(pick[static_cast<std::size_t>(i)]);
      rhs[i] = b[pick[static_cast<std::size_t>(i)]];
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(S);
    lu.setThreshold(1e-10);
    if (lu.rank() == p) {
      const Eigen::VectorXd x = lu.solve(rhs);
      if (((A * x - b).array() <= 1e-9).all()) {
        const Eigen::MatrixXd M = polytope.from_parameters(x);
        bool dup = false;
        for (const auto& F : found)
          if ((F - M).cwiseAbs().maxCoeff() < 1e-9) {
            dup = true;
            break;
          }
        if (!dup) found.push_back(M);
      }
    }
    // next combination
    Index i = p - 1;
    while (i >= 0 && pick[static_cast<std::size_t>(i)] == R - p + i) --i;
    if (i < 0) break;
    ++pick[static_cast<std::size_t>(i)];
    for (Index k = i + 1; k < p; ++k) pick[static_cast<std::size_t>(k)] = pick[static_cast<std::size_t>(k - 1)] + 1;
  }
  return found;
}

QPSolution enumerate_vertices_bruteforce(const MacrostatePolytope& polytope) {
  const auto vertices = enumerate_vertices(polytope);
  const QPSolution* best = nullptr;
  std::vector<QPSolution> cands;
  cands.reserve(vertices.size());
  for (std::size_t v = 0; v < vertices.size(); ++v) {
    QPSolution s;
    s.M = vertices[v];
    s.det_abs = std::abs(s.M.determinant());
    s.start_index = static_cast<int>(v);
    s.upsilon = upsilon(s.M);
    cands.push_back(std::move(s));
  }
  for (const auto& c : cands) {
    if (!full_rank(c.M)) continue;
    if (!best || better(c, *best)) best = &c;
  }
  if (!best) throw Error(ErrorCode::DegenerateOptimum, "polytope has no full-rank vertex");
  QPSolution out = finish(*best, polytope, 1e-9);
  out.start_index = -1;
  out.upsilon_trace = {out.upsilon};
  return out;
}

}  // namespace macrostate
