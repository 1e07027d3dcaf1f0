#pragma once

#include "macrostate/laplacian.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace macrostate {

/// Low-lying eigensystem of a LaplacianSystem.
///
/// `rates` are the decay rates mu_i = -lambda_i in ascending order. Column 0
/// of `vectors` is the system's stationary state psi0; every other column has
/// its largest-magnitude entry positive. `omega` holds the ratios
/// psi_i / psi0 at every node, so column 0 is identically one.
struct EigenBasis {
  Eigen::VectorXd rates;
  Eigen::MatrixXd vectors;
  Eigen::MatrixXd omega;

  Index size() const { return rates.size(); }
};

struct DecomposeOptions {
  /// Systems up to this size use a dense symmetric eigensolver.
  Index dense_limit = 4096;
  /// mu <= zero_tol * max|H| counts as a zero rate.
  double zero_tol = 1e-10;
  /// Relative residual accepted for a Lanczos Ritz pair.
  double lanczos_tol = 1e-11;
  int max_lanczos_runs = 200;
  std::uint64_t seed = 0x5eed;
};

EigenBasis decompose(const LaplacianSystem& system, Index k, const DecomposeOptions& options = {});

/// Multiscale gaps r_m = mu_m / mu_{m-1} for m = 2..K-1.
struct GapProfile {
  Eigen::VectorXd rates;
  std::map<int, double> gaps;
  double beta = 1.0;
};

/// `zero_tol` is absolute; a negative value means 1e-10 * max(rates).
GapProfile spectral_gaps(const Eigen::VectorXd& rates, double zero_tol = -1.0);

/// Largest m whose gap strictly exceeds `cutoff`.
int select_m(const GapProfile& profile, double cutoff = 1.5);

/// Gap table over a beta grid. Rows of `gaps` are m = 2..m_max, columns
/// follow `betas`; a failed column holds NaN and its message in `errors`.
struct GapTable {
  std::vector<double> betas;
  int m_max = 20;
  Eigen::MatrixXd gaps;
  std::vector<Eigen::VectorXd> rates;
  std::vector<std::string> errors;

  bool column_ok(std::size_t c) const { return errors[c].empty(); }
  GapProfile profile(std::size_t c) const;
};

using SystemBuilder = std::function<LaplacianSystem(double beta)>;

struct ScanOptions {
  DecomposeOptions decompose;
  /// 0 means one worker per hardware thread.
  unsigned workers = 0;
};

GapTable scan_beta(const SystemBuilder& build, std::span<const double> betas, int m_max = 20,
                   const ScanOptions& options = {});

/// Evenly spaced (linear or logarithmic) beta grid including both endpoints.
std::vector<double> beta_grid(double start, double stop, int count, bool logarithmic = false);

}  // namespace macrostate
