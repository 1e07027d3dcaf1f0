#include "macrostate/mixture.hpp"

#include "macrostate/error.hpp"
#include "macrostate/qp.hpp"

namespace macrostate {

namespace {

Eigen::VectorXd normalized(const Eigen::VectorXd& measure) {
  const double total = measure.sum();
  if (!(total > 0.0) || (measure.array() < 0.0).any())
    throw Error(ErrorCode::InvalidArgument, "measure must be nonnegative with positive total");
  return measure / total;
}

void fill_components(MacrostateModel& model) {
  const Index n = model.w.rows();
  const int m = static_cast<int>(model.w.cols());
  model.a = model.w.transpose() * model.measure;
  for (int c = 0; c < m; ++c)
    if (!(model.a[c] > 1e-12))
      throw Error(ErrorCode::ZeroWeightComponent, "component " + std::to_string(c) + " has zero weight");
  model.components.resize(n, m);
  for (int c = 0; c < m; ++c)
    model.components.col(c) = model.w.col(c).cwiseProduct(model.measure) / model.a[c];
  model.labels = hard_labels(model.w);
}

}  // namespace

MacrostateModel assemble(const Eigen::MatrixXd& M, const EigenBasis& basis,
                         const Eigen::VectorXd& measure, double beta) {
  const int m = static_cast<int>(M.rows());
  if (M.cols() != m || m < 1 || m > basis.size())
    throw Error(ErrorCode::InvalidArgument, "M must be square with m <= basis size");
  if (measure.size() != basis.omega.rows())
    throw Error(ErrorCode::InvalidArgument, "measure length must match the basis");

  MacrostateModel model;
  model.M = M;
  model.beta = beta;
  model.measure = normalized(measure);
  model.w = basis.omega.leftCols(m) * M.transpose();
  model.phi = basis.vectors.leftCols(m) * M.transpose();
  fill_components(model);
  model.upsilon = upsilon(M);
  return model;
}

MacrostateModel model_from_windows(const Eigen::MatrixXd& M, const Eigen::MatrixXd& w,
                                   const Eigen::VectorXd& measure, double beta) {
  if (w.rows() != measure.size()) throw Error(ErrorCode::InvalidArgument, "window/measure size mismatch");
  MacrostateModel model;
  model.M = M;
  model.beta = beta;
  model.measure = normalized(measure);
  model.w = w;
  fill_components(model);
  model.upsilon = 1.0 - w.rowwise().squaredNorm().dot(model.measure);
  return model;
}

MacrostateModel hard_threshold(const MacrostateModel& model) {
  const Index n = model.w.rows();
  const Index m = model.w.cols();
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, m);
  const auto labels = hard_labels(model.w);
  for (Index j = 0; j < n; ++j) w(j, labels[static_cast<std::size_t>(j)]) = 1.0;
  MacrostateModel out = model_from_windows(model.M, w, model.measure, model.beta);
  out.phi = model.phi;
  return out;
}

}  // namespace macrostate
