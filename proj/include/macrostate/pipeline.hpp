#pragma once

#include "macrostate/mixture.hpp"
#include "macrostate/qp.hpp"

#include <cstdint>
#include <optional>

namespace macrostate {

struct FitOptions {
  double gap_cutoff = 1.5;
  int m_max = 20;
  /// Explicit component count; 0 selects m from the gap profile.
  int m = 0;
  int n_starts = 16;
  std::uint64_t seed = 1;
  bool threshold = false;
  QPOptions qp;
  DecomposeOptions decompose;
};

struct FitResult {
  EigenBasis basis;
  GapProfile gaps;
  int m = 1;
  QPSolution solution;
  MacrostateModel model;
  std::optional<MacrostateModel> crisp;
};

/// decompose -> gaps -> select m -> multistart -> assemble (-> threshold).
/// `unmix_measure` replaces the system measure in assembly; grid inputs at
/// beta != 1 pass the normalized input density here.
FitResult fit(const LaplacianSystem& system, const FitOptions& options,
              const Eigen::VectorXd* unmix_measure = nullptr);

}  // namespace macrostate
