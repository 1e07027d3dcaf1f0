#pragma once

#include "macrostate/spectra.hpp"

#include <vector>

namespace macrostate {

/// Mixture model induced by a coefficient matrix M on an eigenbasis.
///
/// Rows of `w` are the window functions (soft assignment probabilities) at
/// each point and sum to one. `components` holds the discrete component
/// distributions f_a(j) = w(j, a) * measure(j) / a_a, so that
/// sum_a a_a * components(j, a) == measure(j).
struct MacrostateModel {
  Eigen::MatrixXd M;
  Eigen::MatrixXd w;
  Eigen::VectorXd a;
  Eigen::MatrixXd components;
  std::vector<int> labels;
  double upsilon = 0.0;
  double beta = 1.0;
  Eigen::VectorXd measure;
  /// Macrostate functions Phi_a = sum_i M(a, i) psi_i; empty when the model
  /// was not assembled from eigenvectors.
  Eigen::MatrixXd phi;

  int m() const { return static_cast<int>(M.rows()); }
};

/// Row-wise argmax with lowest-index tie-break.
template <typename Derived>
std::vector<int> hard_labels(const Eigen::MatrixBase<Derived>& w) {
  std::vector<int> labels(static_cast<std::size_t>(w.rows()));
  for (Eigen::Index j = 0; j < w.rows(); ++j) {
    int best = 0;
    for (Eigen::Index a = 1; a < w.cols(); ++a)
      if (w(j, a) > w(j, best)) best = static_cast<int>(a);
    labels[static_cast<std::size_t>(j)] = best;
  }
  return labels;
}

inline std::vector<int> hard_labels(const MacrostateModel& model) { return hard_labels(model.w); }

/// `measure` is normalized internally; pass the system measure for item and
/// graph inputs, or the normalized input density to unmix a grid density at
/// beta != 1.
MacrostateModel assemble(const Eigen::MatrixXd& M, const EigenBasis& basis,
                         const Eigen::VectorXd& measure, double beta = 1.0);

/// Windows given directly (one-hot or otherwise); recomputes a, components,
/// labels and upsilon = 1 - sum_a <w_a^2>_measure.
MacrostateModel model_from_windows(const Eigen::MatrixXd& M, const Eigen::MatrixXd& w,
                                   const Eigen::VectorXd& measure, double beta);

MacrostateModel hard_threshold(const MacrostateModel& model);

}  // namespace macrostate
