#include <doctest.h>

#include <random>

#include <Eigen/Dense>

#include "oracles.hpp"
#include "pireduce/errors.hpp"
#include "pireduce/monomial.hpp"

using namespace pireduce;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

MatrixXd positive_features(Rng& rng, Eigen::Index n, Eigen::Index p, double lo = 0.1, double hi = 10.0) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  MatrixXd X(n, p);
  for (Eigen::Index i = 0; i < X.size(); ++i) X.data()[i] = std::exp(u(rng));
  return X;
}

// Closed-form OLS on [1, ln X] via the normal equations and an LDLT solve.
VectorXd ols_log(const MatrixXd& X, const VectorXd& y) {
  MatrixXd Z(X.rows(), X.cols() + 1);
  Z.col(0).setOnes();
  Z.rightCols(X.cols()) = X.array().log().matrix();
  return (Z.transpose() * Z).ldlt().solve(Z.transpose() * y.array().log().matrix());
}

}  // namespace

TEST_CASE("fit_monomial: noise-free recovery") {
  Rng rng = make_rng(51, 0);
  const MatrixXd X = positive_features(rng, 100, 2);
  const VectorXd y = 2.0 * X.col(0).array().sqrt() / X.col(1).array();
  const MonomialModel m = fit_monomial(X, y, {"U1", "U2"}, {1e-12});
  CHECK(std::abs(m.exponents(0) - 0.5) < 1e-6);
  CHECK(std::abs(m.exponents(1) + 1.0) < 1e-6);
  CHECK(std::abs(m.intercept() - 2.0) < 1e-6);
  CHECK(m.lambda == 1e-12);
  const VectorXd pred = m.predict(X);
  CHECK(((pred - y).array().abs() / y.array()).maxCoeff() < 1e-5);
}

TEST_CASE("fit_monomial: constant target") {
  Rng rng = make_rng(52, 0);
  const MatrixXd X = positive_features(rng, 60, 3);
  const VectorXd y = VectorXd::Constant(60, 4.5);
  const MonomialModel m = fit_monomial(X, y, {"a", "b", "c"});
  CHECK(m.exponents.cwiseAbs().maxCoeff() < 1e-8);
  CHECK(m.intercept() == doctest::Approx(4.5).epsilon(1e-8));
}

TEST_CASE("fit_monomial: log-domain errors name row and column") {
  MatrixXd X = MatrixXd::Ones(5, 2);
  X(3, 1) = -1.0;
  try {
    fit_monomial(X, VectorXd::Ones(5), {"U1", "U2"});
    FAIL("expected LogDomain");
  } catch (const LogDomain& e) {
    const std::string msg = e.what();
    CHECK(msg.find("row 4") != std::string::npos);
    CHECK(msg.find("U2") != std::string::npos);
  }
  VectorXd y = VectorXd::Ones(5);
  y(0) = 0.0;
  CHECK_THROWS_AS(fit_monomial(MatrixXd::Ones(5, 2), y, {"U1", "U2"}), LogDomain);
  CHECK_THROWS_AS(fit_monomial(MatrixXd::Ones(5, 2), VectorXd::Ones(5), {"U1"}), DimensionError);
  CHECK_THROWS_AS(fit_monomial(MatrixXd::Ones(5, 2), VectorXd::Ones(5), {"U1", "U2"}, {}), ConfigError);
}

TEST_CASE("predict_monomial: examples") {
  MonomialModel m;
  m.intercept_log = std::log(3.0);
  m.exponents = VectorXd::Zero(4);
  m.feature_names = {"a", "b", "c", "d"};
  Rng rng = make_rng(53, 0);
  const MatrixXd X = positive_features(rng, 7, 4);
  CHECK((predict_monomial(m, X).array() - 3.0).abs().maxCoeff() < 1e-14);

  m.intercept_log = 0.0;
  m.exponents << 1, 0, 0, 0;
  CHECK((predict_monomial(m, X) - X.col(0)).cwiseAbs().maxCoeff() < 1e-14 * X.col(0).maxCoeff());

  MatrixXd bad = X;
  bad(2, 2) = 0.0;
  CHECK_THROWS_AS(predict_monomial(m, bad), LogDomain);
  CHECK_THROWS_AS(predict_monomial(m, X.leftCols(3)), DimensionError);
}

TEST_CASE("property: lambda 0 equals the OLS oracle") {
  Rng rng = make_rng(54, 0);
  std::normal_distribution<double> noise(0.0, 0.3);
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::Index p = 1 + trial % 4;
    const MatrixXd X = positive_features(rng, 40, p);
    VectorXd y(40);
    for (Eigen::Index i = 0; i < 40; ++i) y(i) = std::exp(noise(rng)) * (1 + X(i, 0));
    std::vector<std::string> names;
    for (Eigen::Index j = 0; j < p; ++j) names.push_back("x" + std::to_string(j));
    const MonomialModel m = fit_monomial(X, y, names, {0.0});
    const VectorXd beta = ols_log(X, y);
    CHECK(std::abs(m.intercept_log - beta(0)) < 1e-8);
    CHECK((m.exponents - beta.tail(p)).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("property: target rescaling scales only the intercept") {
  Rng rng = make_rng(55, 0);
  std::uniform_real_distribution<double> u(0.5, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    const MatrixXd X = positive_features(rng, 30, 3);
    VectorXd y(30);
    for (Eigen::Index i = 0; i < 30; ++i) y(i) = u(rng) * X(i, 1);
    const double c = 0.01 + 100 * u(rng);
    const MonomialModel a = fit_monomial(X, y, {"a", "b", "c"}, {0.0});
    const MonomialModel b = fit_monomial(X, (c * y).eval(), {"a", "b", "c"}, {0.0});
    CHECK(b.intercept() == doctest::Approx(c * a.intercept()).epsilon(1e-9));
    CHECK((a.exponents - b.exponents).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("lambda grid search") {
  Rng rng = make_rng(56, 0);
  std::normal_distribution<double> noise(0.0, 0.1);
  const MatrixXd X = positive_features(rng, 80, 2);
  VectorXd y(80);
  for (Eigen::Index i = 0; i < 80; ++i) y(i) = std::exp(noise(rng)) * std::pow(X(i, 0), 0.7);
  const MonomialModel m = fit_monomial(X, y, {"a", "b"});
  CHECK(m.lambda_grid == default_lambda_grid());
  CHECK(m.cv_mse.size() == m.lambda_grid.size());
  const auto best = std::min_element(m.cv_mse.begin(), m.cv_mse.end()) - m.cv_mse.begin();
  CHECK(m.lambda == m.lambda_grid[std::size_t(best)]);
  CHECK(std::abs(m.exponents(0) - 0.7) < 0.05);
  CHECK(default_lambda_grid().front() == 1e-6);
  CHECK(default_lambda_grid().back() == 100.0);
  CHECK(default_lambda_grid().size() == 9);

  // A flat target makes every lambda tie; the smallest wins.
  const MonomialModel flat = fit_monomial(X, VectorXd::Constant(80, 2.0), {"a", "b"}, {10.0, 1.0, 0.1});
  CHECK(flat.lambda == 0.1);
}
