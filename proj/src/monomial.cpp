#include "pireduce/monomial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pireduce/dataio.hpp"
#include "pireduce/errors.hpp"
#include "pireduce/numerics.hpp"

namespace pireduce {

using Eigen::Index;

namespace {

void require_positive(const Eigen::MatrixXd& X, const std::vector<std::string>& names, const char* what) {
  for (Index c = 0; c < X.cols(); ++c) {
    for (Index r = 0; r < X.rows(); ++r) {
      if (!(X(r, c) > 0.0)) {
        const std::string col = c < static_cast<Index>(names.size()) ? names[static_cast<std::size_t>(c)]
                                                                     : "#" + std::to_string(c + 1);
        throw LogDomain(std::string(what) + ": row " + std::to_string(r + 1) + ", column '" + col +
                        "' is not strictly positive");
      }
    }
  }
}

Eigen::MatrixXd log_design(const Eigen::MatrixXd& X) {
  Eigen::MatrixXd Z(X.rows(), X.cols() + 1);
  Z.col(0).setOnes();
  Z.rightCols(X.cols()) = X.array().log().matrix();
  return Z;
}

}  // namespace

double MonomialModel::intercept() const { return std::exp(intercept_log); }

Eigen::VectorXd MonomialModel::predict(const Eigen::MatrixXd& X) const {
  if (X.cols() != exponents.size()) {
    throw DimensionError("monomial model expects " + std::to_string(exponents.size()) + " features, got " +
                         std::to_string(X.cols()));
  }
  require_positive(X, feature_names, "predict_monomial");
  const Eigen::VectorXd log_y = (X.array().log().matrix() * exponents).array() + intercept_log;
  return log_y.array().exp();
}

Eigen::VectorXd predict_monomial(const MonomialModel& model, const Eigen::MatrixXd& X) { return model.predict(X); }

std::vector<double> default_lambda_grid() {
  std::vector<double> grid;
  for (int k = -6; k <= 2; ++k) grid.push_back(std::pow(10.0, k));
  return grid;
}

MonomialModel fit_monomial(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                           const std::vector<std::string>& feature_names, const std::vector<double>& lambda_grid,
                           int k_folds, std::uint64_t seed) {
  if (X.rows() != y.size()) throw DimensionError("fit_monomial: rows(X) != len(y)");
  if (static_cast<Index>(feature_names.size()) != X.cols()) {
    throw DimensionError("fit_monomial: need one feature name per column");
  }
  if (lambda_grid.empty()) throw ConfigError("fit_monomial: empty lambda grid");
  require_positive(X, feature_names, "fit_monomial");
  require_positive(y, {"target"}, "fit_monomial");

  const Eigen::MatrixXd Z = log_design(X);
  const Eigen::VectorXd t = y.array().log();

  MonomialModel model;
  model.feature_names = feature_names;
  model.lambda_grid = lambda_grid;

  double best_lambda = lambda_grid.front();
  if (lambda_grid.size() > 1) {
    const auto folds = kfold_indices(Z.rows(), k_folds, seed);
    double best_mse = std::numeric_limits<double>::infinity();
    for (double lambda : lambda_grid) {
      double total = 0.0;
      for (const auto& val : folds) {
        std::vector<bool> held(static_cast<std::size_t>(Z.rows()), false);
        for (Index r : val) held[static_cast<std::size_t>(r)] = true;
        std::vector<Index> train;
        for (Index r = 0; r < Z.rows(); ++r) {
          if (!held[static_cast<std::size_t>(r)]) train.push_back(r);
        }
        const Eigen::VectorXd beta = ridge_solve(Z(train, Eigen::all), t(train), lambda);
        total += (Z(val, Eigen::all) * beta - t(val)).squaredNorm() / double(val.size());
      }
      const double cv = total / double(folds.size());
      model.cv_mse.push_back(cv);
      // Differences at rounding level count as ties; the smaller lambda wins those.
      const double tol = 1e-9 * std::max(cv, best_mse == std::numeric_limits<double>::infinity() ? cv : best_mse) + 1e-20;
      if (cv < best_mse - tol) {
        best_mse = cv;
        best_lambda = lambda;
      } else if (cv <= best_mse + tol && lambda < best_lambda) {
        best_mse = std::min(best_mse, cv);
        best_lambda = lambda;
      }
    }
  }

  const Eigen::VectorXd beta = ridge_solve(Z, t, best_lambda);
  model.lambda = best_lambda;
  model.intercept_log = beta(0);
  model.exponents = beta.tail(X.cols());
  return model;
}

}  // namespace pireduce
