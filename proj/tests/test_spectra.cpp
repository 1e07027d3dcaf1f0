#include "macrostate/error.hpp"
#include "macrostate/spectra.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <cmath>

using namespace macrostate;
using namespace test_support;

namespace {

DensityGrid wells_1d(Index n, double extent, const std::vector<double>& centers, double sigma) {
  std::vector<double> f(static_cast<std::size_t>(n), 0.0);
  const double h = 2.0 * extent / static_cast<double>(n - 1);
  for (Index j = 0; j < n; ++j) {
    const double x = -extent + h * static_cast<double>(j);
    for (double c : centers) f[static_cast<std::size_t>(j)] += std::exp(-0.5 * (x - c) * (x - c) / (sigma * sigma));
  }
  return grid_1d(f, h);
}

LaplacianSystem scaled(LaplacianSystem sys, double c) {
  sys.H *= c;
  return sys;
}

}  // namespace

TEST_SUITE("spectra") {

TEST_CASE("three-node path rates") {
  const auto basis = decompose(build_grid_system(grid_1d({2.0, 2.0, 2.0}), 1.0), 3);
  CHECK(std::abs(basis.rates[0]) < 1e-12);
  CHECK(basis.rates[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(basis.rates[2] == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("two-node grid decay rate") {
  const double beta = 1.0, v = 2.0 * std::log(2.0);
  const auto basis = decompose(build_grid_system(grid_1d({1.0, std::exp(-v)}), beta), 2);
  CHECK(basis.rates[1] == doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("basis contract: orthonormal, signed, ratio column of ones") {
  std::mt19937_64 rng(21);
  const auto sys = build_grid_system(random_grid(rng, {6, 5}), 1.4);
  const auto basis = decompose(sys, 8);
  const Eigen::MatrixXd G = basis.vectors.transpose() * basis.vectors;
  CHECK((G - Eigen::MatrixXd::Identity(8, 8)).cwiseAbs().maxCoeff() <= 1e-8);
  CHECK((basis.vectors.col(0).array() > 0.0).all());
  CHECK((basis.omega.col(0).array() == 1.0).all());
  for (Index i = 1; i < 8; ++i) {
    Index arg = 0;
    basis.vectors.col(i).cwiseAbs().maxCoeff(&arg);
    CHECK(basis.vectors(arg, i) > 0.0);
    CHECK(basis.rates[i] >= basis.rates[i - 1]);
    CHECK((basis.omega.col(i) - basis.vectors.col(i).cwiseQuotient(sys.psi0)).cwiseAbs().maxCoeff() < 1e-12);
  }
  // Rates agree with an independent dense solve.
  const Eigen::VectorXd mu = dense_rates(dense(sys.H));
  for (Index i = 0; i < 8; ++i) CHECK(std::abs(basis.rates[i] - mu[i]) <= 1e-10 * sys.max_abs());
}

TEST_CASE("sum of all rates equals the trace of -H") {
  std::mt19937_64 rng(22);
  const auto sys = build_graph_system(random_graph(rng, 25, 30), 1.6);
  const auto basis = decompose(sys, sys.size());
  const double trace = -dense(sys.H).trace();
  CHECK(std::abs(basis.rates.sum() - trace) <= 1e-8 * std::abs(trace));
}

TEST_CASE("decompose is deterministic") {
  std::mt19937_64 rng(23);
  const auto sys = build_grid_system(random_grid(rng, {12, 12}), 2.0);
  DecomposeOptions lanczos;
  lanczos.dense_limit = 10;
  for (const auto& opts : {DecomposeOptions{}, lanczos}) {
    const auto a = decompose(sys, 6, opts);
    const auto b = decompose(sys, 6, opts);
    CHECK(a.rates == b.rates);
    CHECK(a.vectors == b.vectors);
  }
}

TEST_CASE("iterative path agrees with the dense path") {
  std::mt19937_64 rng(24);
  DecomposeOptions lanczos;
  lanczos.dense_limit = 10;
  for (auto dims : std::vector<std::vector<Index>>{{30, 30}, {400}, {8, 8, 8}}) {
    const auto sys = build_grid_system(random_grid(rng, dims), 1.5);
    const auto d = decompose(sys, 7);
    const auto l = decompose(sys, 7, lanczos);
    for (Index i = 1; i < 7; ++i) {
      CHECK(std::abs(d.rates[i] - l.rates[i]) <= 1e-8 * d.rates[i]);
      const bool separated = (d.rates[i] - d.rates[i - 1]) > 1e-6 * d.rates[i] &&
                             (i + 1 >= 7 || (d.rates[i + 1] - d.rates[i]) > 1e-6 * d.rates[i]);
      if (separated) CHECK(std::abs(d.vectors.col(i).dot(l.vectors.col(i))) >= 1.0 - 1e-7);
    }
  }
}

TEST_CASE("iterative path recovers a degenerate pair") {
  // Uniform square grid: rates of the separable Laplacian repeat.
  DensityGrid g;
  g.shape.dims = {20, 20};
  g.shape.spacing = {1.0, 1.0};
  g.shape.origin = {0.0, 0.0};
  g.values = Eigen::VectorXd::Ones(400);
  const auto sys = build_grid_system(g, 1.0);
  DecomposeOptions lanczos;
  lanczos.dense_limit = 10;
  const auto l = decompose(sys, 6, lanczos);
  const Eigen::VectorXd mu = dense_rates(dense(sys.H));
  for (Index i = 0; i < 6; ++i) CHECK(std::abs(l.rates[i] - mu[i]) <= 1e-9);
  const double s = 2.0 - 2.0 * std::cos(M_PI / 20.0);
  CHECK(l.rates[1] == doctest::Approx(s).epsilon(1e-9));
  CHECK(l.rates[2] == doctest::Approx(s).epsilon(1e-9));
  const Eigen::MatrixXd G = l.vectors.transpose() * l.vectors;
  CHECK((G - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("disconnected system is detected") {
  LaplacianSystem sys;
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(4, 4);
  H.topLeftCorner<2, 2>() << -1, 1, 1, -1;
  H.bottomRightCorner<2, 2>() << -1, 1, 1, -1;
  sys.H = H.sparseView();
  sys.psi0 = Eigen::VectorXd::Constant(4, 0.5);
  sys.measure = Eigen::VectorXd::Constant(4, 0.25);
  try {
    decompose(sys, 3);
    FAIL("expected DisconnectedSystem");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DisconnectedSystem);
  }
}

TEST_CASE("gap arithmetic") {
  Eigen::VectorXd r(4);
  r << 0, 1, 10, 11;
  const auto p = spectral_gaps(r);
  CHECK(p.gaps.size() == 2);
  CHECK(p.gaps.at(2) == doctest::Approx(10.0).epsilon(1e-15));
  CHECK(p.gaps.at(3) == doctest::Approx(1.1).epsilon(1e-15));
  CHECK(p.gaps.count(1) == 0);

  Eigen::VectorXd deg(3);
  deg << 0, 5, 5;
  CHECK(spectral_gaps(deg).gaps.at(2) == 1.0);

  Eigen::VectorXd zero(3);
  zero << 0, 0, 3;
  try {
    spectral_gaps(zero);
    FAIL("expected ZeroDenominator");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ZeroDenominator);
    CHECK(e.count() == 2);
  }
}

TEST_CASE("model order is the largest gap above the cutoff") {
  GapProfile p;
  p.gaps = {{2, 1.2}, {3, 5.0}, {4, 1.1}};
  CHECK(select_m(p, 1.5) == 3);
  p.gaps = {{2, 1.6}, {3, 1.2}, {4, 1.7}};
  CHECK(select_m(p, 1.5) == 4);
  p.gaps = {{2, 1.5}, {3, 1.2}, {4, 1.1}};
  try {
    select_m(p, 1.5);
    FAIL("expected NoSeparableStructure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoSeparableStructure);
  }
}

TEST_CASE("gaps are invariant under scaling of H") {
  std::mt19937_64 rng(25);
  std::vector<LaplacianSystem> systems{build_grid_system(random_grid(rng, {7, 7}), 1.0),
                                       build_graph_system(random_graph(rng, 30, 20), 1.0),
                                       build_item_system(kernel_similarity(random_items(rng, 30, 2), KernelKind::gaussian, 0.8),
                                                         Normalization::unnormalized, 1.0)};
  for (const auto& sys : systems) {
    const auto base = spectral_gaps(decompose(sys, 12).rates);
    for (double c : {0.1, 10.0}) {
      const auto s = spectral_gaps(decompose(scaled(sys, c), 12).rates);
      for (const auto& [m, g] : base.gaps) CHECK(std::abs(s.gaps.at(m) - g) <= 1e-10 * g);
    }
  }
}

TEST_CASE("single-beta scan equals a direct decomposition") {
  std::mt19937_64 rng(26);
  const auto g = random_grid(rng, {9, 4});
  const std::vector<double> betas{1.0};
  const auto table = scan_beta([&](double b) { return build_grid_system(g, b); }, betas, 6);
  REQUIRE(table.column_ok(0));
  const auto direct = spectral_gaps(decompose(build_grid_system(g, 1.0), 7).rates);
  for (const auto& [m, r] : direct.gaps) CHECK(table.gaps(m - 2, 0) == r);
  CHECK(table.rates[0] == decompose(build_grid_system(g, 1.0), 7).rates);
}

TEST_CASE("two-node rate increases across a beta scan") {
  const auto g = grid_1d({1.0, 0.1});
  const auto betas = beta_grid(0.5, 3.0, 6);
  const auto table = scan_beta([&](double b) { return build_grid_system(g, b); }, betas, 2);
  for (std::size_t c = 1; c < betas.size(); ++c) CHECK(table.rates[c][1] > table.rates[c - 1][1]);
}

TEST_CASE("three separated wells have their largest gap at m = 3") {
  const auto g = wells_1d(240, 12.0, {-7.0, 0.0, 7.0}, 1.0);
  const auto betas = beta_grid(1.0, 3.0, 8);
  ScanOptions opts;
  opts.workers = 2;
  const auto table = scan_beta([&](double b) { return build_grid_system(g, b); }, betas, 10, opts);
  for (std::size_t c = 0; c < betas.size(); ++c) {
    REQUIRE(table.column_ok(c));
    Index arg = 0;
    table.gaps.col(static_cast<Index>(c)).maxCoeff(&arg);
    CHECK(arg + 2 == 3);
    // Higher in-well gaps also clear the cutoff; the largest qualifying m wins.
    CHECK(select_m(table.profile(c), 1.5) >= 3);
    // Independent dense oracle. mu_2 is tiny, so agreement is limited by the
    // absolute eigenvalue accuracy of either solver.
    const Eigen::VectorXd mu = dense_rates(dense(build_grid_system(g, betas[c]).H));
    CHECK(table.gaps(1, static_cast<Index>(c)) == doctest::Approx(mu[3] / mu[2]).epsilon(1e-5));
  }
}

TEST_CASE("failed scan columns are marked, not fatal") {
  const std::vector<double> betas{1.0, 2.0};
  const auto table = scan_beta(
      [](double b) {
        if (b > 1.5) throw Error(ErrorCode::AllZeroDensity, "synthetic failure");
        return build_grid_system(grid_1d({1.0, 2.0, 3.0, 1.0}), b);
      },
      betas, 4);
  CHECK(table.column_ok(0));
  CHECK_FALSE(table.column_ok(1));
  CHECK(std::isnan(table.gaps(0, 1)));
}

TEST_CASE("beta grids include both endpoints") {
  const auto lin = beta_grid(1.0, 3.0, 5);
  CHECK(lin.front() == 1.0);
  CHECK(lin.back() == 3.0);
  CHECK(lin[2] == doctest::Approx(2.0));
  const auto lg = beta_grid(0.1, 10.0, 3, true);
  CHECK(lg[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(lg.back() == 10.0);
  CHECK(beta_grid(2.0, 2.0, 1) == std::vector<double>{2.0});
}

}  // TEST_SUITE
