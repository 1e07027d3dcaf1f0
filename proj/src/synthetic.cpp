#include "macrostate/synthetic.hpp"

#include "macrostate/error.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace macrostate {

std::string_view to_string(Profile profile) {
  switch (profile) {
    case Profile::gaussian: return "gaussian";
    case Profile::laplace: return "laplace";
    case Profile::sech: return "sech";
  }
  return "unknown";
}

Profile profile_from_string(std::string_view name) {
  if (name == "gaussian") return Profile::gaussian;
  if (name == "laplace") return Profile::laplace;
  if (name == "sech") return Profile::sech;
  throw Error(ErrorCode::InvalidArgument, "unknown profile '" + std::string(name) + "'");
}

double profile_value(Profile profile, double r) {
  switch (profile) {
    case Profile::gaussian: return std::exp(-0.5 * r * r);
    case Profile::laplace: return std::exp(-r);
    case Profile::sech: return 1.0 / std::cosh(r);
  }
  return 0.0;
}

void SyntheticSpec::validate() const {
  if (grid < 2) throw Error(ErrorCode::InvalidArgument, "grid needs at least 2 nodes per axis");
  if (!(extent > 0.0)) throw Error(ErrorCode::InvalidArgument, "extent must be positive");
  if (profiles.empty()) throw Error(ErrorCode::InvalidArgument, "at least one component profile is required");
  if (bumps < 1) throw Error(ErrorCode::InvalidArgument, "bumps must be positive");
  if (!(scale_min > 0.0 && scale_max >= scale_min))
    throw Error(ErrorCode::InvalidArgument, "need 0 < scale_min <= scale_max");
  if (!(center_jitter >= 0.0) || !(anchor_radius >= 0.0))
    throw Error(ErrorCode::InvalidArgument, "anchor radius and jitter must be nonnegative");
}

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

struct Bump {
  double cx, cy;
  Eigen::Matrix2d precision;  // inverse shape matrix
};

}  // namespace

SyntheticMixture generate_synthetic_mixture(const SyntheticSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  const int K = static_cast<int>(spec.profiles.size());
  const Index g = spec.grid;
  const double h = 2.0 * spec.extent / static_cast<double>(g - 1);

  SyntheticMixture out;
  out.profiles = spec.profiles;
  out.grid.shape.dims = {g, g};
  out.grid.shape.spacing = {h, h};
  out.grid.shape.origin = {-spec.extent, -spec.extent};
  const Index n = g * g;
  out.truth = Eigen::MatrixXd::Zero(n, K);

  for (int k = 0; k < K; ++k) {
    const double sector = 2.0 * std::numbers::pi / K;
    const double angle = sector * (k + uniform(rng, 0.35, 0.65));
    const double ax = spec.anchor_radius * spec.extent * std::cos(angle);
    const double ay = spec.anchor_radius * spec.extent * std::sin(angle);

    std::vector<Bump> bumps;
    for (int b = 0; b < spec.bumps; ++b) {
      const double rr = spec.center_jitter * std::sqrt(uniform(rng, 0.0, 1.0));
      const double tt = uniform(rng, 0.0, 2.0 * std::numbers::pi);
      const double rot = uniform(rng, 0.0, std::numbers::pi);
      const double s1 = uniform(rng, spec.scale_min, spec.scale_max);
      const double s2 = uniform(rng, spec.scale_min, spec.scale_max);
      Eigen::Matrix2d R;
      R << std::cos(rot), -std::sin(rot), std::sin(rot), std::cos(rot);
      const Eigen::Matrix2d P = R * Eigen::Vector2d(1.0 / (s1 * s1), 1.0 / (s2 * s2)).asDiagonal() * R.transpose();
      bumps.push_back({ax + rr * std::cos(tt), ay + rr * std::sin(tt), P});
    }

    for (Index i = 0; i < g; ++i) {
      for (Index j = 0; j < g; ++j) {
        const Eigen::Vector2d x(-spec.extent + h * static_cast<double>(i), -spec.extent + h * static_cast<double>(j));
        double v = 0.0;
        for (const auto& bump : bumps) {
          const Eigen::Vector2d d = x - Eigen::Vector2d(bump.cx, bump.cy);
          v += profile_value(spec.profiles[static_cast<std::size_t>(k)], std::sqrt(d.dot(bump.precision * d)));
        }
        out.truth(i * g + j, k) = v;
      }
    }
    out.truth.col(k) /= out.truth.col(k).sum() * K;
  }
  out.grid.values = out.truth.rowwise().sum();
  const double total = out.grid.values.sum();
  out.grid.values /= total;
  out.truth /= total;
  return out;
}

}  // namespace macrostate
