#include "macrostate/pipeline.hpp"

#include "macrostate/error.hpp"

#include <algorithm>

namespace macrostate {

FitResult fit(const LaplacianSystem& system, const FitOptions& options,
              const Eigen::VectorXd* unmix_measure) {
  if (options.m < 0) throw Error(ErrorCode::InvalidArgument, "m must be nonnegative");
  if (options.m_max < 2) throw Error(ErrorCode::InvalidArgument, "m_max must be at least 2");
  const Index n = system.size();
  const Index k = std::min<Index>(n, std::max(options.m_max, options.m) + 1);

  FitResult out;
  out.basis = decompose(system, k, options.decompose);
  out.gaps = spectral_gaps(out.basis.rates);
  out.gaps.beta = system.beta;
  if (options.m == 0 && out.gaps.gaps.empty())
    throw Error(ErrorCode::NoSeparableStructure, "too few eigenpairs for any gap; pass m explicitly");
  out.m = options.m > 0 ? options.m : select_m(out.gaps, options.gap_cutoff);
  if (out.m > out.basis.size())
    throw Error(ErrorCode::InvalidArgument, "m exceeds the number of available eigenpairs");

  if (out.m == 1) {
    out.solution.M = Eigen::MatrixXd::Identity(1, 1);
    out.solution.upsilon = 0.0;
    out.solution.det_abs = 1.0;
    out.solution.upsilon_trace = {0.0};
  } else {
    const MacrostatePolytope polytope = build_polytope(out.basis, out.m);
    out.solution = multistart_optimize(polytope, options.n_starts, options.seed, options.qp);
  }
  const Eigen::VectorXd& measure = unmix_measure ? *unmix_measure : system.measure;
  out.model = assemble(out.solution.M, out.basis, measure, system.beta);
  if (options.threshold) out.crisp = hard_threshold(out.model);
  return out;
}

}  // namespace macrostate
