#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace pireduce {

/// y = exp(intercept_log) * prod_i x_i ^ exponents_i
struct MonomialModel {
  double intercept_log = 0.0;
  Eigen::VectorXd exponents;
  std::vector<std::string> feature_names;
  double lambda = 0.0;

  // Grid search record; empty for hand-built laws.
  std::vector<double> lambda_grid;
  std::vector<double> cv_mse;

  double intercept() const;
  /// Throws LogDomain on a non-positive input, DimensionError on a width mismatch.
  Eigen::VectorXd predict(const Eigen::MatrixXd& X) const;
};

/// {1e-6, 1e-5, ..., 1e2}
std::vector<double> default_lambda_grid();

/// Ridge fit of ln y = ln a0 + sum_i a_i ln x_i. The penalty is chosen from
/// `lambda_grid` by mean k-fold validation MSE in log space (ties go to the
/// smaller lambda), then the model is refit on all rows.
MonomialModel fit_monomial(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                           const std::vector<std::string>& feature_names,
                           const std::vector<double>& lambda_grid = default_lambda_grid(),
                           int k_folds = 5, std::uint64_t seed = 0);

Eigen::VectorXd predict_monomial(const MonomialModel& model, const Eigen::MatrixXd& X);

}  // namespace pireduce
