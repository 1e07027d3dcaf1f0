#include "macrostate/spectra.hpp"

#include "macrostate/error.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

namespace macrostate {

namespace {

// splitmix64; gives the same start vectors on every platform.
struct StartVectorSource {
  std::uint64_t state;

  double next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return static_cast<double>(z >> 11) * 0x1.0p-53 * 2.0 - 1.0;
  }
};

// Two passes of classical Gram-Schmidt against the columns of Q.
void orthogonalize(Eigen::VectorXd& v, const Eigen::MatrixXd& Q, Index cols) {
  if (cols == 0) return;
  for (int pass = 0; pass < 2; ++pass) {
    const Eigen::VectorXd c = Q.leftCols(cols).transpose() * v;
    v.noalias() -= Q.leftCols(cols) * c;
  }
}

void fix_signs(Eigen::MatrixXd& vectors) {
  for (Index c = 1; c < vectors.cols(); ++c) {
    Index arg = 0;
    double best = -1.0;
    for (Index r = 0; r < vectors.rows(); ++r) {
      const double a = std::abs(vectors(r, c));
      if (a > best * (1.0 + 1e-12)) {
        best = a;
        arg = r;
      }
    }
    if (vectors(arg, c) < 0.0) vectors.col(c) = -vectors.col(c);
  }
}

struct Eigenpairs {
  Eigen::VectorXd rates;   // ascending, excluding the stationary mode
  Eigen::MatrixXd vectors; // orthonormal, orthogonal to psi0
};

// Rayleigh-Ritz on span(V) for -H; returns ascending pairs.
Eigenpairs rayleigh_ritz(const SparseMatrix& H, const Eigen::MatrixXd& V) {
  const Eigen::MatrixXd HV = H * V;
  Eigen::MatrixXd small = -(V.transpose() * HV);
  small = 0.5 * (small + small.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(small);
  return {es.eigenvalues(), V * es.eigenvectors()};
}

Eigenpairs dense_pairs(const LaplacianSystem& sys, Index count) {
  const Eigen::MatrixXd A = -Eigen::MatrixXd(sys.H);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::ConvergenceFailure, "dense eigensolver failed");
  // Index 0 belongs to the stationary mode; re-project the rest against the
  // exact psi0 and finish with a small Rayleigh-Ritz step.
  Eigen::MatrixXd V = es.eigenvectors().middleCols(1, count);
  for (Index c = 0; c < V.cols(); ++c) {
    Eigen::VectorXd v = V.col(c);
    v -= sys.psi0 * sys.psi0.dot(v);
    V.col(c) = v;
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(V);
  V = qr.householderQ() * Eigen::MatrixXd::Identity(V.rows(), V.cols());
  return rayleigh_ritz(sys.H, V);
}

// Shift-invert Lanczos with full reorthogonalization and locking. The
// operator is (sigma I - H)^{-1}; psi0 is locked from the start so the
// near-singular direction never enters the Krylov space.
class ShiftInvertLanczos {
 public:
  ShiftInvertLanczos(const LaplacianSystem& sys, const DecomposeOptions& opt)
      : sys_(sys), opt_(opt), rng_{opt.seed}, n_(sys.size()) {
    const double hmax = sys.max_abs();
    sigma_ = 1e-9 * hmax;
    SparseMatrix A = -sys.H;
    for (Index j = 0; j < n_; ++j) A.coeffRef(j, j) += sigma_;
    solver_.compute(A);
    if (solver_.info() != Eigen::Success)
      throw Error(ErrorCode::ConvergenceFailure, "sparse factorization of the shifted generator failed");
  }

  Eigenpairs run(Index count) {
    Eigen::MatrixXd locked(n_, count + 1);
    Eigen::VectorXd locked_rates(count + 1);
    locked.col(0) = sys_.psi0;
    Index nlocked = 1;

    Index dim = std::max<Index>(40, 2 * count + 20);
    int runs = 0;
    bool verifying = false;
    while (true) {
      if (++runs > opt_.max_lanczos_runs)
        throw Error(ErrorCode::ConvergenceFailure, "Lanczos did not converge");
      const Index room = n_ - nlocked;
      if (room <= 0) break;
      const Index need = count - (nlocked - 1);
      const Index steps = std::min(room, dim);
      auto [theta, ritz, converged] = krylov(locked, nlocked, steps);

      if (!verifying) {
        Index accepted = 0;
        for (Index i = 0; i < theta.size() && accepted < need; ++i) {
          if (!converged[i]) break;
          locked.col(nlocked) = ritz.col(i);
          locked_rates[nlocked - 1] = 1.0 / theta[i] - sigma_;
          ++nlocked;
          ++accepted;
        }
        if (accepted == 0) {
          if (steps == room) throw Error(ErrorCode::ConvergenceFailure, "Lanczos stagnated");
          dim = std::min(room, 2 * dim);
          continue;
        }
        if (nlocked - 1 == count) verifying = true;
        continue;
      }

      // Verification: the dominant pair of the deflated operator must not
      // be slower than the slowest locked pair (catches missed copies of
      // degenerate eigenvalues).
      if (theta.size() == 0 || !converged[0]) {
        if (steps == room) break;
        dim = std::min(room, 2 * dim);
        continue;
      }
      const double mu = 1.0 / theta[0] - sigma_;
      Index worst = 0;
      for (Index i = 1; i < count; ++i)
        if (locked_rates[i] > locked_rates[worst]) worst = i;
      if (!(mu < locked_rates[worst] * (1.0 - 1e-10))) break;
      // Swap the missed pair in; the evicted one stays out of the locked
      // set, so re-orthogonalize the survivors.
      locked.col(worst + 1) = ritz.col(0);
      locked_rates[worst] = mu;
      for (Index c = 1; c < nlocked; ++c) {
        Eigen::VectorXd v = locked.col(c);
        orthogonalize(v, locked, c);
        locked.col(c) = v / v.norm();
      }
    }
    return rayleigh_ritz(sys_.H, locked.middleCols(1, nlocked - 1));
  }

 private:
  struct KrylovResult {
    Eigen::VectorXd theta;          // descending Ritz values of the inverse
    Eigen::MatrixXd ritz;           // matching Ritz vectors
    std::vector<bool> converged;
  };

  KrylovResult krylov(const Eigen::MatrixXd& locked, Index nlocked, Index steps) {
    Eigen::MatrixXd Q(n_, steps);
    Eigen::VectorXd alpha(steps), beta(steps);

    Eigen::VectorXd v(n_);
    for (Index j = 0; j < n_; ++j) v[j] = rng_.next();
    orthogonalize(v, locked, nlocked);
    v /= v.norm();

    Index m = 0;
    double last_beta = 0.0;
    for (; m < steps; ++m) {
      Q.col(m) = v;
      Eigen::VectorXd w = solver_.solve(v);
      orthogonalize(w, locked, nlocked);
      alpha[m] = v.dot(w);
      orthogonalize(w, Q, m + 1);
      const double b = w.norm();
      beta[m] = b;
      last_beta = b;
      if (b <= 1e-14 * std::abs(alpha[m]) || b == 0.0) {
        ++m;
        last_beta = 0.0;
        break;
      }
      v = w / b;
    }

    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
    for (Index i = 0; i < m; ++i) {
      T(i, i) = alpha[i];
      if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    KrylovResult out;
    out.theta.resize(m);
    out.ritz.resize(n_, m);
    out.converged.resize(static_cast<std::size_t>(m));
    const Eigen::MatrixXd Y = Q.leftCols(m) * es.eigenvectors();
    const double top = std::abs(es.eigenvalues()[m - 1]);
    for (Index i = 0; i < m; ++i) {
      const Index src = m - 1 - i;  // descending
      out.theta[i] = es.eigenvalues()[src];
      out.ritz.col(i) = Y.col(src).normalized();
      const double residual = std::abs(last_beta * es.eigenvectors()(m - 1, src));
      out.converged[static_cast<std::size_t>(i)] =
          out.theta[i] > 0.0 && residual <= opt_.lanczos_tol * std::max(out.theta[i], 1e-3 * top);
    }
    return out;
  }

  const LaplacianSystem& sys_;
  const DecomposeOptions& opt_;
  StartVectorSource rng_;
  Index n_;
  double sigma_ = 0.0;
  Eigen::SimplicialLDLT<SparseMatrix> solver_;
};

}  // namespace

EigenBasis decompose(const LaplacianSystem& system, Index k, const DecomposeOptions& options) {
  const Index n = system.size();
  if (k < 1 || k > n) throw Error(ErrorCode::InvalidArgument, "k must lie in [1, n]");

  const double hmax = system.max_abs();
  const Index count = std::min(n - 1, std::max<Index>(k - 1, 1));  // non-stationary pairs
  Eigenpairs pairs;
  if (count > 0) {
    if (n <= options.dense_limit) {
      pairs = dense_pairs(system, count);
    } else {
      ShiftInvertLanczos lanczos(system, options);
      pairs = lanczos.run(count);
    }
    if (pairs.rates[0] <= options.zero_tol * hmax)
      throw Error(ErrorCode::DisconnectedSystem,
                  "second decay rate is zero; the system is not connected");
  }

  EigenBasis basis;
  basis.rates.resize(k);
  basis.vectors.resize(n, k);
  basis.rates[0] = std::max(0.0, -system.psi0.dot(system.H * system.psi0));
  basis.vectors.col(0) = system.psi0;
  for (Index i = 1; i < k; ++i) {
    basis.rates[i] = pairs.rates[i - 1];
    basis.vectors.col(i) = pairs.vectors.col(i - 1);
  }
  fix_signs(basis.vectors);

  basis.omega.resize(n, k);
  basis.omega.col(0).setOnes();
  for (Index i = 1; i < k; ++i)
    basis.omega.col(i) = basis.vectors.col(i).cwiseQuotient(system.psi0);
  return basis;
}

GapProfile spectral_gaps(const Eigen::VectorXd& rates, double zero_tol) {
  if (rates.size() < 2) throw Error(ErrorCode::InvalidArgument, "need at least two rates");
  for (Index i = 1; i < rates.size(); ++i)
    if (rates[i] < rates[i - 1]) throw Error(ErrorCode::InvalidArgument, "rates must be ascending");
  const double tol = zero_tol >= 0.0 ? zero_tol : 1e-10 * rates.cwiseAbs().maxCoeff();
  GapProfile out;
  out.rates = rates;
  for (Index m = 2; m < rates.size(); ++m) {
    if (!(rates[m - 1] > tol))
      throw Error(ErrorCode::ZeroDenominator, "rate mu_" + std::to_string(m - 1) + " is zero",
                  static_cast<long>(m));
    out.gaps[static_cast<int>(m)] = rates[m] / rates[m - 1];
  }
  return out;
}

int select_m(const GapProfile& profile, double cutoff) {
  if (!(cutoff > 1.0)) throw Error(ErrorCode::InvalidArgument, "gap cutoff must exceed 1");
  if (profile.gaps.empty()) throw Error(ErrorCode::InvalidArgument, "gap profile is empty");
  for (auto it = profile.gaps.rbegin(); it != profile.gaps.rend(); ++it)
    if (it->second > cutoff) return it->first;
  throw Error(ErrorCode::NoSeparableStructure, "no spectral gap exceeds the cutoff");
}

GapProfile GapTable::profile(std::size_t c) const {
  GapProfile p;
  p.beta = betas[c];
  p.rates = rates[c];
  for (int m = 2; m <= m_max; ++m) {
    const double g = gaps(m - 2, static_cast<Index>(c));
    if (std::isfinite(g)) p.gaps[m] = g;
  }
  return p;
}

GapTable scan_beta(const SystemBuilder& build, std::span<const double> betas, int m_max,
                   const ScanOptions& options) {
  if (betas.empty()) throw Error(ErrorCode::InvalidArgument, "beta grid is empty");
  if (m_max < 2) throw Error(ErrorCode::InvalidArgument, "m_max must be at least 2");
  for (std::size_t i = 0; i < betas.size(); ++i) {
    if (!(betas[i] > 0.0)) throw Error(ErrorCode::InvalidArgument, "beta values must be positive");
    if (i > 0 && !(betas[i] > betas[i - 1]))
      throw Error(ErrorCode::InvalidArgument, "beta grid must be ascending");
  }

  GapTable table;
  table.betas.assign(betas.begin(), betas.end());
  table.m_max = m_max;
  const std::size_t cols = betas.size();
  table.gaps = Eigen::MatrixXd::Constant(m_max - 1, static_cast<Index>(cols),
                                         std::numeric_limits<double>::quiet_NaN());
  table.rates.resize(cols);
  table.errors.resize(cols);

  auto column = [&](std::size_t c) {
    try {
      const LaplacianSystem sys = build(betas[c]);
      const Index k = std::min<Index>(sys.size(), m_max + 1);
      const EigenBasis basis = decompose(sys, k, options.decompose);
      table.rates[c] = basis.rates;
      const GapProfile p = spectral_gaps(basis.rates, options.decompose.zero_tol * sys.max_abs());
      for (const auto& [m, g] : p.gaps) table.gaps(m - 2, static_cast<Index>(c)) = g;
    } catch (const std::exception& e) {
      table.errors[c] = e.what();
      if (table.errors[c].empty()) table.errors[c] = "unknown error";
    }
  };

  unsigned workers = options.workers ? options.workers : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(cols));
  if (workers <= 1) {
    for (std::size_t c = 0; c < cols; ++c) column(c);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t c = w; c < cols; c += workers) column(c);
      });
    for (auto& t : pool) t.join();
  }
  return table;
}

std::vector<double> beta_grid(double start, double stop, int count, bool logarithmic) {
  if (count < 1) throw Error(ErrorCode::InvalidArgument, "beta count must be positive");
  if (!(start > 0.0) || !(stop >= start)) throw Error(ErrorCode::InvalidArgument, "need 0 < start <= stop");
  std::vector<double> out(static_cast<std::size_t>(count));
  if (count == 1) {
    out[0] = start;
    return out;
  }
  for (int i = 0; i < count; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(count - 1);
    out[static_cast<std::size_t>(i)] =
        logarithmic ? std::exp(std::log(start) + t * (std::log(stop) - std::log(start)))
                    : start + t * (stop - start);
  }
  out.back() = stop;
  return out;
}

}  // namespace macrostate
