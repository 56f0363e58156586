#include <doctest.h>

#include <random>

#include <Eigen/Dense>

#include "oracles.hpp"
#include "pireduce/errors.hpp"
#include "pireduce/numerics.hpp"
#include "pireduce/pi_engine.hpp"
#include "pireduce/schema.hpp"

using namespace pireduce;
using Eigen::MatrixXd;
using Eigen::VectorXd;

TEST_CASE("solve_exact: identity") {
  const RationalMatrix I = RationalMatrix::Identity(4, 4);
  RationalVector b(4);
  b << 0, 0, 0, 1;
  CHECK(solve_exact(I, b) == b);
}

TEST_CASE("solve_exact: Pv over the reference base subset") {
  const DatasetSchema schema = builtin_biofilter_schema();
  const std::vector<std::string> base{"T", "IC_org", "A", "C_fit"};
  const std::vector<std::string> dims{"L", "M", "T", "K"};
  const RationalMatrix A = dimension_matrix(schema, base, dims);
  const RationalVector b = dimension_matrix(schema, {"Pv"}, dims).col(0);
  RationalVector expected(4);
  expected << 0, 0, 0, 1;
  CHECK(solve_exact(A, b) == expected);
}

TEST_CASE("solve_exact: errors") {
  RationalMatrix S(2, 2);
  S << 1, 2, 2, 4;
  RationalVector b(2);
  b << 1, 1;
  CHECK_THROWS_AS(solve_exact(S, b), SingularSystem);
  CHECK_THROWS_AS(solve_exact(RationalMatrix::Identity(2, 3), b), DimensionError);
  CHECK_THROWS_AS(solve_exact(RationalMatrix::Identity(3, 3), b), DimensionError);
}

TEST_CASE("rank_exact: examples") {
  CHECK(rank_exact(RationalMatrix::Identity(4, 4)) == 4);
  const DatasetSchema schema = builtin_biofilter_schema();
  const std::vector<std::string> dims{"L", "M", "T", "K"};
  CHECK(rank_exact(dimension_matrix(schema, {"T", "IC_org", "A", "C_fit"}, dims)) == 4);
  CHECK(rank_exact(dimension_matrix(schema, {"P", "C_fit", "Pv", "A"}, dims)) == 2);
  CHECK(rank_exact(RationalMatrix::Zero(3, 2)) == 0);
}

TEST_CASE("property: solve_exact residual is exactly zero") {
  Rng rng = make_rng(21, 0);
  int solved = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const RationalMatrix A = oracle::random_rational_matrix(rng, 4, 4);
    RationalVector x(4);
    for (int i = 0; i < 4; ++i) x(i) = oracle::random_rational(rng);
    if (oracle::determinant(A) == 0) {
      CHECK_THROWS_AS(solve_exact(A, oracle::matvec(A, x)), SingularSystem);
      continue;
    }
    const RationalVector b = oracle::matvec(A, x);
    const RationalVector got = solve_exact(A, b);
    CHECK(got == x);
    const RationalVector residual = oracle::matvec(A, got) - b;
    for (Eigen::Index i = 0; i < 4; ++i) CHECK(residual(i) == 0);
    ++solved;
  }
  CHECK(solved > 250);
}

TEST_CASE("property: rank_exact matches the minors oracle") {
  Rng rng = make_rng(22, 0);
  std::uniform_int_distribution<int> shape(1, 5);
  std::uniform_int_distribution<int> coin(0, 2);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index r = shape(rng), c = shape(rng);
    RationalMatrix A = oracle::random_rational_matrix(rng, r, c, 3, 2);
    // Force deficiency often: copy or combine rows.
    if (r > 1 && coin(rng) == 0)
      for (Eigen::Index j = 0; j < c; ++j) A(r - 1, j) = A(0, j) * Rational(3, 2);
    if (r > 2 && coin(rng) == 0)
      for (Eigen::Index j = 0; j < c; ++j) A(1, j) = A(0, j) - A(r - 1, j);
    if (coin(rng) == 0)
      for (Eigen::Index i = 0; i < r; ++i) A(i, 0) = 0;
    CHECK(rank_exact(A) == oracle::rank_by_minors(A));
  }
}

TEST_CASE("pca_fit: single varying column") {
  MatrixXd X(5, 3);
  X << 1, 2, 7, 1, 4, 7, 1, 6, 7, 1, 8, 7, 1, 3, 7;
  const PcaFit p = pca_fit(X, 1);
  CHECK(std::abs(p.components(0, 1)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(p.components(0, 1) > 0);
  CHECK(std::abs(p.components(0, 0)) < 1e-12);
  CHECK(std::abs(p.components(0, 2)) < 1e-12);
}

TEST_CASE("pca_fit: points on y = x") {
  MatrixXd X(6, 2);
  for (int i = 0; i < 6; ++i) X.row(i) << i * 0.7 - 1, i * 0.7 - 1;
  const PcaFit p = pca_fit(X, 1);
  CHECK(p.components(0, 0) == doctest::Approx(1 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(p.components(0, 1) == doctest::Approx(1 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(p.explained_variance(0) / p.total_variance == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("pca_fit: errors") {
  CHECK_THROWS_AS(pca_fit(MatrixXd::Random(5, 3), 4), DimensionError);
  CHECK_THROWS_AS(pca_fit(MatrixXd::Random(5, 3), 0), DimensionError);
  CHECK_THROWS_AS(pca_fit(MatrixXd::Random(1, 3), 1), DimensionError);
}

TEST_CASE("property: pca orthonormality, ordering and lossless reconstruction") {
  Rng rng = make_rng(23, 0);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 30; ++trial) {
    const int cols = 2 + trial % 6;
    MatrixXd X(40, cols);
    MatrixXd mix(cols, cols);
    for (auto* m : {&X, &mix})
      for (Eigen::Index i = 0; i < m->size(); ++i) m->data()[i] = g(rng);
    X = X * mix;
    const PcaFit full = pca_fit(X, cols);
    CHECK((full.components * full.components.transpose() - MatrixXd::Identity(cols, cols)).cwiseAbs().maxCoeff() <
          1e-10);
    for (int k = 1; k < cols; ++k) CHECK(full.explained_variance(k - 1) >= full.explained_variance(k));
    const MatrixXd back = full.reconstruct(full.project(X));
    CHECK((back - X).norm() / X.norm() < 1e-8);
    CHECK(full.explained_variance.sum() == doctest::Approx(full.total_variance).epsilon(1e-10));
  }
}

TEST_CASE("ridge_solve: examples") {
  MatrixXd X(3, 2);
  X << 1, 1, 1, 2, 1, 3;
  VectorXd y(3);
  y << 2, 4, 6;
  const VectorXd beta = ridge_solve(X, y, 0.0);
  CHECK(beta(0) == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(std::abs(beta(0)) < 1e-10);
  CHECK(std::abs(beta(1) - 2) < 1e-10);

  const VectorXd big = ridge_solve(X, y, 1e12);
  CHECK(std::abs(big(1)) < 1e-9);
  CHECK(big(0) == doctest::Approx(y.mean()).epsilon(1e-8));

  MatrixXd bad = X;
  bad(1, 1) = std::nan("");
  CHECK_THROWS_AS(ridge_solve(bad, y, 0.0), NumericError);
  CHECK_THROWS_AS(ridge_solve(X, VectorXd::Ones(2), 0.0), DimensionError);
}

TEST_CASE("property: ridge with lambda 0 matches the pseudo-inverse") {
  Rng rng = make_rng(24, 0);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 50; ++trial) {
    const int p = 1 + trial % 5;
    MatrixXd X(30, p + 1);
    VectorXd y(30);
    for (Eigen::Index i = 0; i < X.size(); ++i) X.data()[i] = g(rng);
    for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = g(rng);
    X.col(0).setOnes();
    const VectorXd pinv = X.completeOrthogonalDecomposition().pseudoInverse() * y;
    CHECK((ridge_solve(X, y, 0.0) - pinv).norm() < 1e-8 * (1 + pinv.norm()));
  }
}

TEST_CASE("ridge: penalty shrinks slopes monotonically") {
  Rng rng = make_rng(25, 0);
  std::normal_distribution<double> g;
  MatrixXd X(50, 4);
  VectorXd y(50);
  for (Eigen::Index i = 0; i < X.size(); ++i) X.data()[i] = g(rng);
  for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = X(i, 1) * 2 - X(i, 2) + 0.1 * g(rng);
  X.col(0).setOnes();
  double prev = ridge_solve(X, y, 0.0).tail(3).norm();
  for (double lambda : {0.1, 1.0, 10.0, 100.0}) {
    const double now = ridge_solve(X, y, lambda).tail(3).norm();
    CHECK(now <= prev + 1e-12);
    prev = now;
  }
}
