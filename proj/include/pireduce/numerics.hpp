#pragma once

#include <Eigen/Dense>

#include "pireduce/rational.hpp"

namespace pireduce {

template <class T>
using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <class T>
using Vector = Eigen::Matrix<T, Eigen::Dynamic, 1>;

using RationalMatrix = Matrix<Rational>;
using RationalVector = Vector<Rational>;

/// Exact solution of A x = b by Gauss-Jordan elimination over the rationals.
/// Throws SingularSystem when A is singular, DimensionError on shape mismatch.
RationalVector solve_exact(const RationalMatrix& A, const RationalVector& b);

/// Exact rank by fraction-free (Bareiss) elimination after clearing row denominators.
Eigen::Index rank_exact(const RationalMatrix& A);

/// Principal axes of mean-centred data.
struct PcaFit {
  Eigen::MatrixXd components;          // k x cols, orthonormal rows
  Eigen::VectorXd means;               // per column
  Eigen::VectorXd explained_variance;  // k eigenvalues, descending
  double total_variance = 0.0;         // trace of the covariance

  /// (X - means) * components^T
  Eigen::MatrixXd project(const Eigen::MatrixXd& X) const;
  Eigen::MatrixXd reconstruct(const Eigen::MatrixXd& scores) const;
};

/// PCA on the sample covariance (n - 1) of X. Each component is sign-fixed so its
/// largest-magnitude entry is positive.
PcaFit pca_fit(const Eigen::MatrixXd& X, Eigen::Index k);

/// Ridge regression through the regularised normal equations
///   (X^T X + lambda D) beta = X^T y,  D = I with D(intercept_col) = 0.
/// Pass intercept_col = -1 to penalise every coefficient.
Eigen::VectorXd ridge_solve(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda,
                            Eigen::Index intercept_col = 0);

/// Throws NumericError naming `what` if any entry is NaN or infinite.
void require_finite(const Eigen::Ref<const Eigen::MatrixXd>& M, const char* what);

}  // namespace pireduce
