#pragma once

#include "macrostate/laplacian.hpp"

#include <cstdint>
#include <string_view>
#include <vector>

namespace macrostate {

enum class Profile { gaussian, laplace, sech };

std::string_view to_string(Profile profile);
Profile profile_from_string(std::string_view name);

/// Radial profile g(r) with r the anisotropic (Mahalanobis) radius.
double profile_value(Profile profile, double r);

/// Randomized mixture of anisotropic radial bumps on a 2-D square grid.
///
/// Component k gets `bumps` bumps of profile `profiles[k]`. Its anchor sits
/// at radius `anchor_radius * extent` in the k-th of K equal angular sectors
/// (so components occupy disjoint parts of the domain); bump centers scatter
/// around the anchor by at most `center_jitter`. Each bump has a random
/// orientation and principal scales drawn from [scale_min, scale_max].
struct SyntheticSpec {
  Index grid = 200;              // nodes per axis
  double extent = 10.0;          // domain [-extent, extent]^2
  std::vector<Profile> profiles{Profile::gaussian, Profile::laplace, Profile::sech};
  int bumps = 3;
  double anchor_radius = 0.45;
  double center_jitter = 1.0;
  double scale_min = 0.8;
  double scale_max = 1.6;
  std::uint64_t seed = 1;

  void validate() const;
};

struct SyntheticMixture {
  DensityGrid grid;           // values sum to one
  Eigen::MatrixXd truth;      // n x K, columns a_k f_k; rows sum to grid values
  std::vector<Profile> profiles;
};

SyntheticMixture generate_synthetic_mixture(const SyntheticSpec& spec);

}  // namespace macrostate
