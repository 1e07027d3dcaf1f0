#include "macrostate/error.hpp"
#include "macrostate/laplacian.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <cmath>

using namespace macrostate;
using namespace test_support;

TEST_SUITE("laplacian") {

TEST_CASE("negative log density of exponentials recovers the exponents") {
  const auto V = negative_log_density(grid_1d({std::exp(-1.0), std::exp(-2.0), std::exp(-3.0)}));
  CHECK(V.values[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(V.values[1] == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(V.values[2] == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("zero density is clamped at the floor") {
  const auto V = negative_log_density(grid_1d({0.0, 2.0, 1.0}), 1e-12);
  CHECK(std::isfinite(V.values[0]));
  CHECK(V.values[0] == doctest::Approx(-std::log(1e-12 * 2.0)).epsilon(1e-14));
}

TEST_CASE("uniform density gives a constant potential") {
  const auto V = negative_log_density(grid_1d({0.3, 0.3, 0.3, 0.3}));
  CHECK((V.values.array() == V.values[0]).all());
}

TEST_CASE("all-zero density is rejected") {
  try {
    negative_log_density(grid_1d({0.0, 0.0}));
    FAIL("expected AllZeroDensity");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::AllZeroDensity);
  }
}

TEST_CASE("two-node grid matches the closed form") {
  // V = (0, v) with beta * v = 2 ln 2, h = 1.
  const double beta = 1.5;
  const double v = 2.0 * std::log(2.0) / beta;
  const auto sys = build_grid_system(grid_1d({1.0, std::exp(-v)}), beta);
  const Eigen::MatrixXd H = dense(sys.H);
  Eigen::Matrix2d expected;
  expected << -0.5, 1.0, 1.0, -2.0;
  CHECK((H - expected).cwiseAbs().maxCoeff() < 1e-12);
  const Eigen::VectorXd mu = dense_rates(H);
  CHECK(std::abs(mu[0]) < 1e-12);
  CHECK(mu[1] == doctest::Approx(2.0 * std::cosh(beta * v / 2.0)).epsilon(1e-12));
  CHECK(mu[1] == doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("two-node decay rate increases with beta") {
  double previous = 0.0;
  for (double beta : {0.5, 1.0, 1.5, 2.0, 3.0}) {
    const auto sys = build_grid_system(grid_1d({1.0, 0.25}, 0.5), beta);
    const double mu1 = dense_rates(dense(sys.H))[1];
    const double dv = std::log(4.0);
    CHECK(mu1 == doctest::Approx(2.0 / 0.25 * std::cosh(beta * dv / 2.0)).epsilon(1e-12));
    CHECK(mu1 > previous);
    previous = mu1;
  }
}

TEST_CASE("uniform three-node path is the path-graph Laplacian") {
  const auto sys = build_grid_system(grid_1d({1.0, 1.0, 1.0}), 1.0);
  Eigen::Matrix3d L;
  L << 1, -1, 0, -1, 2, -1, 0, -1, 1;
  CHECK((dense(sys.H) + L).cwiseAbs().maxCoeff() < 1e-14);
  const Eigen::VectorXd mu = dense_rates(dense(sys.H));
  CHECK(std::abs(mu[0]) < 1e-12);
  CHECK(mu[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(mu[2] == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("grid systems satisfy the structural invariants") {
  std::mt19937_64 rng(11);
  for (auto dims : std::vector<std::vector<Index>>{{5}, {4, 3}, {3, 3, 2}, {2, 2, 2, 2}}) {
    const auto g = random_grid(rng, dims);
    for (double beta : {0.5, 1.0, 2.7}) {
      const auto sys = build_grid_system(g, beta);
      const Eigen::MatrixXd H = dense(sys.H);
      CHECK(null_residual(sys) <= 1e-10);
      CHECK((H - H.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * sys.max_abs());
      for (Index i = 0; i < H.rows(); ++i)
        for (Index j = 0; j < H.cols(); ++j)
          if (i != j) CHECK(H(i, j) >= 0.0);
      CHECK(sys.measure.sum() == doctest::Approx(1.0).epsilon(1e-12));
      CHECK((sys.measure.array() > 0.0).all());
      CHECK(sys.psi0.norm() == doctest::Approx(1.0).epsilon(1e-12));
      // measure is the normalized power f^beta
      const Eigen::VectorXd fb = g.values.array().pow(beta).matrix();
      CHECK((sys.measure - fb / fb.sum()).cwiseAbs().maxCoeff() <= 1e-12);
      CHECK(dense_rates(H)[0] >= -1e-10 * sys.max_abs());
    }
  }
}

TEST_CASE("grid off-diagonals equal inverse squared spacing") {
  DensityGrid g;
  g.shape.dims = {2, 3};
  g.shape.spacing = {0.5, 2.0};
  g.shape.origin = {0.0, 0.0};
  g.values = Eigen::VectorXd::LinSpaced(6, 0.2, 1.0);
  const Eigen::MatrixXd H = dense(build_grid_system(g, 1.3).H);
  // Row-major: node (i, j) -> 3 i + j. Axis 0 neighbours differ by 3.
  CHECK(H(0, 3) == doctest::Approx(4.0));
  CHECK(H(0, 1) == doctest::Approx(0.25));
  CHECK(H(0, 2) == 0.0);
  CHECK(H(0, 4) == 0.0);
}

TEST_CASE("gaussian similarity follows its definition") {
  ItemSet s;
  s.items.resize(3, 2);
  s.items << 0, 0, 0, 0, 0.8, 0.0;
  const auto W = kernel_similarity(s, KernelKind::gaussian, 0.8);
  CHECK(W(0, 1) == 1.0);
  CHECK(W(0, 2) == doctest::Approx(std::exp(-0.5)).epsilon(1e-14));
  CHECK(W(0, 2) == doctest::Approx(0.60653).epsilon(1e-5));
  CHECK(W(2, 2) == 1.0);
  const auto T = kernel_similarity(s, KernelKind::gaussian, 0.8, 0.7);
  CHECK(T(0, 2) == 0.0);
  CHECK(T(2, 0) == 0.0);
  CHECK(T(2, 2) == 1.0);
  CHECK(T(0, 1) == 1.0);
}

TEST_CASE("non-finite items are rejected") {
  ItemSet s;
  s.items.resize(2, 1);
  s.items << 0.0, std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(kernel_similarity(s, KernelKind::gaussian, 1.0), Error);
  s.items << 1e200, -1e200;
  try {
    kernel_similarity(s, KernelKind::gaussian, 1.0);
    FAIL("expected NonFiniteDistance");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonFiniteDistance);
  }
}

TEST_CASE("outlier filter drops an isolated item") {
  Eigen::Matrix4d W;
  W << 1, 1, 1, 0.01,
       1, 1, 1, 0.01,
       1, 1, 1, 0.01,
       0.01, 0.01, 0.01, 1;
  // Means: (2.01 / 3) for items 0..2 and 0.01 for item 3; global mean 0.505,
  // so the threshold 0.101 removes item 3 only.
  const auto kept = filter_outliers(W, 0.2);
  CHECK(kept == std::vector<Index>{0, 1, 2});
  // Idempotence.
  const auto again = filter_outliers(restrict_similarity(W, kept), 0.2);
  CHECK(again == std::vector<Index>{0, 1, 2});
}

TEST_CASE("outlier filter keeps everything for equal similarities or tiny ratios") {
  Eigen::MatrixXd W = Eigen::MatrixXd::Constant(5, 5, 0.4);
  W.diagonal().setOnes();
  CHECK(filter_outliers(W, 0.2).size() == 5);
  std::mt19937_64 rng(3);
  const auto items = random_items(rng, 12, 2);
  const auto K = kernel_similarity(items, KernelKind::gaussian, 1.0);
  CHECK(filter_outliers(K, 1e-9).size() == 12);
}

TEST_CASE("outlier filter is idempotent on random data") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 10; ++t) {
    const auto items = random_items(rng, 25, 3);
    const auto K = kernel_similarity(items, KernelKind::gaussian, 0.7);
    const auto kept = filter_outliers(K, 0.2);
    const auto sub = restrict_similarity(K, kept);
    CHECK(filter_outliers(sub, 0.2).size() == kept.size());
  }
}

TEST_CASE("unnormalized triangle has rates 0, 3, 3") {
  Eigen::Matrix3d W;
  W << 1, 1, 1, 1, 1, 1, 1, 1, 1;
  const auto sys = build_item_system(W, Normalization::unnormalized, 1.0);
  const Eigen::VectorXd mu = dense_rates(dense(sys.H));
  CHECK(std::abs(mu[0]) < 1e-12);
  CHECK(mu[1] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(mu[2] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK((sys.measure.array() - 1.0 / 3.0).abs().maxCoeff() < 1e-15);
}

TEST_CASE("elementwise beta power equals a narrower gaussian") {
  std::mt19937_64 rng(7);
  const auto items = random_items(rng, 15, 2);
  const double scale = 1.3;
  for (double beta : {2.0, 0.5, 3.7}) {
    for (auto norm : {Normalization::unnormalized, Normalization::symmetric}) {
      const auto a = build_item_system(kernel_similarity(items, KernelKind::gaussian, scale), norm, beta);
      const auto b = build_item_system(kernel_similarity(items, KernelKind::gaussian, scale / std::sqrt(beta)), norm, 1.0);
      CHECK((dense(a.H) - dense(b.H)).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
}

TEST_CASE("symmetric normalization has the square-root degree null vector") {
  std::mt19937_64 rng(9);
  const auto items = random_items(rng, 10, 2);
  const auto W = kernel_similarity(items, KernelKind::gaussian, 1.0);
  const auto sys = build_item_system(W, Normalization::symmetric, 1.0);
  Eigen::VectorXd d = W.rowwise().sum() - W.diagonal();
  const Eigen::VectorXd root = d.cwiseSqrt().normalized();
  CHECK((sys.H * root).cwiseAbs().maxCoeff() <= 1e-10 * sys.max_abs());
  CHECK((sys.psi0 - root).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((sys.measure - d / d.sum()).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("block-diagonal similarity reports disconnected input") {
  Eigen::Matrix4d W = Eigen::Matrix4d::Zero();
  W.topLeftCorner<2, 2>().setOnes();
  W.bottomRightCorner<2, 2>().setOnes();
  try {
    build_item_system(W, Normalization::symmetric, 1.0);
    FAIL("expected DisconnectedInput");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DisconnectedInput);
    CHECK(e.count() == 2);
  }
}

TEST_CASE("zero row sum reports an isolated node") {
  Eigen::Matrix3d W = Eigen::Matrix3d::Identity();
  W(0, 1) = W(1, 0) = 0.5;
  try {
    build_item_system(W, Normalization::unnormalized, 1.0);
    FAIL("expected IsolatedNode");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IsolatedNode);
  }
}

TEST_CASE("single undirected edge has rates 0 and 2") {
  GraphSpec g;
  g.n_nodes = 2;
  g.edges = {{0, 1, 1.0}};
  const auto sys = build_graph_system(g, 1.0);
  const Eigen::VectorXd mu = dense_rates(dense(sys.H));
  CHECK(std::abs(mu[0]) < 1e-12);
  CHECK(mu[1] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("graph symmetrization adds both directions") {
  GraphSpec g;
  g.n_nodes = 3;
  g.edges = {{0, 1, 1.0}, {1, 0, 3.0}, {1, 2, 1.0}};
  const auto sys = build_graph_system(g, 1.0);
  // A_sym(0,1) = 4, A_sym(1,2) = 1; degrees (4, 5, 1).
  const Eigen::MatrixXd H = dense(sys.H);
  CHECK(H(0, 1) == doctest::Approx(4.0 / std::sqrt(20.0)).epsilon(1e-14));
  CHECK(H(1, 2) == doctest::Approx(1.0 / std::sqrt(5.0)).epsilon(1e-14));
  CHECK(H(0, 0) == doctest::Approx(-1.0).epsilon(1e-14));
}

TEST_CASE("graph beta scales edge weights elementwise") {
  GraphSpec g;
  g.n_nodes = 3;
  g.edges = {{0, 1, 2.0}, {1, 2, 3.0}};
  const Eigen::MatrixXd H = dense(build_graph_system(g, 2.0).H);
  // Weights 4 and 9; degrees (4, 13, 9).
  CHECK(H(0, 1) == doctest::Approx(4.0 / std::sqrt(4.0 * 13.0)).epsilon(1e-14));
  CHECK(H(1, 2) == doctest::Approx(9.0 / std::sqrt(13.0 * 9.0)).epsilon(1e-14));
}

TEST_CASE("two disjoint edges are disconnected") {
  GraphSpec g;
  g.n_nodes = 4;
  g.edges = {{0, 1, 1.0}, {2, 3, 1.0}};
  try {
    build_graph_system(g, 1.0);
    FAIL("expected DisconnectedInput");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DisconnectedInput);
    CHECK(e.count() == 2);
  }
}

TEST_CASE("zero-degree nodes and self loops are pruned and reported") {
  GraphSpec g;
  g.n_nodes = 5;
  g.edges = {{0, 1, 1.0}, {1, 3, 1.0}, {4, 4, 2.0}};
  const auto sys = build_graph_system(g, 1.0);
  CHECK(sys.size() == 3);
  CHECK(sys.node_ids == std::vector<Index>{0, 1, 3});
  CHECK(sys.dropped_nodes == std::vector<Index>{2, 4});
  CHECK(null_residual(sys) <= 1e-10);
}

TEST_CASE("graph with no edges is empty after pruning") {
  GraphSpec g;
  g.n_nodes = 3;
  g.edges = {{1, 1, 1.0}};
  try {
    build_graph_system(g, 1.0);
    FAIL("expected EmptyGraphAfterPruning");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyGraphAfterPruning);
  }
}

TEST_CASE("item and graph systems satisfy the structural invariants") {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 10; ++t) {
    const auto items = random_items(rng, 20, 3);
    const auto W = kernel_similarity(items, KernelKind::gaussian, 1.5);
    for (auto norm : {Normalization::unnormalized, Normalization::symmetric}) {
      const auto sys = build_item_system(W, norm, 1.7);
      CHECK(null_residual(sys) <= 1e-10);
      CHECK(sys.measure.sum() == doctest::Approx(1.0).epsilon(1e-12));
    }
    const auto sys = build_graph_system(random_graph(rng, 15, 10), 2.0);
    CHECK(null_residual(sys) <= 1e-10);
    const Eigen::MatrixXd H = dense(sys.H);
    CHECK((H - H.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * sys.max_abs());
  }
}

TEST_CASE("invalid arguments are rejected") {
  CHECK_THROWS_AS(build_grid_system(grid_1d({1.0, 1.0}), 0.0), Error);
  CHECK_THROWS_AS(build_grid_system(grid_1d({1.0, -1.0}), 1.0), Error);
  CHECK_THROWS_AS(negative_log_density(grid_1d({1.0}), 1.5), Error);
  GraphSpec g;
  g.n_nodes = 2;
  g.edges = {{0, 2, 1.0}};
  CHECK_THROWS_AS(build_graph_system(g, 1.0), Error);
  g.edges = {{0, 1, -1.0}};
  CHECK_THROWS_AS(build_graph_system(g, 1.0), Error);
}

}  // TEST_SUITE
