#include "pireduce/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "pireduce/errors.hpp"

namespace pireduce {

using Eigen::Index;

RationalVector solve_exact(const RationalMatrix& A, const RationalVector& b) {
  const Index n = A.rows();
  if (A.cols() != n) throw DimensionError("solve_exact: matrix is not square");
  if (b.size() != n) throw DimensionError("solve_exact: right-hand side has wrong length");

  RationalMatrix M = A;
  RationalVector rhs = b;
  for (Index c = 0; c < n; ++c) {
    Index pivot = c;
    while (pivot < n && M(pivot, c) == 0) ++pivot;
    if (pivot == n) {
      throw SingularSystem("solve_exact: singular system (no pivot in column " +
                           std::to_string(c) + ")");
    }
    if (pivot != c) {
      M.row(c).swap(M.row(pivot));
      std::swap(rhs(c), rhs(pivot));
    }
    const Rational inv = Rational(1) / M(c, c);
    for (Index j = c; j < n; ++j) M(c, j) *= inv;
    rhs(c) *= inv;
    for (Index r = 0; r < n; ++r) {
      if (r == c || M(r, c) == 0) continue;
      const Rational f = M(r, c);
      for (Index j = c; j < n; ++j) M(r, j) -= f * M(c, j);
      rhs(r) -= f * rhs(c);
    }
  }
  return rhs;
}

Index rank_exact(const RationalMatrix& A) {
  const Index rows = A.rows();
  const Index cols = A.cols();
  if (rows == 0 || cols == 0) return 0;

  // Scale each row by the lcm of its denominators to get an integer matrix.
  std::vector<std::vector<BigInt>> M(rows, std::vector<BigInt>(cols));
  for (Index i = 0; i < rows; ++i) {
    BigInt l = 1;
    for (Index j = 0; j < cols; ++j) {
      const BigInt d = boost::multiprecision::denominator(A(i, j));
      l = l / boost::multiprecision::gcd(l, d) * d;
    }
    for (Index j = 0; j < cols; ++j) {
      M[i][j] = boost::multiprecision::numerator(A(i, j)) *
                (l / boost::multiprecision::denominator(A(i, j)));
    }
  }

  BigInt prev = 1;
  Index rank = 0;
  for (Index c = 0; c < cols && rank < rows; ++c) {
    Index pivot = rank;
    while (pivot < rows && M[pivot][c] == 0) ++pivot;
    if (pivot == rows) continue;
    std::swap(M[pivot], M[rank]);
    for (Index i = rank + 1; i < rows; ++i) {
      for (Index j = c + 1; j < cols; ++j) {
        M[i][j] = (M[rank][c] * M[i][j] - M[i][c] * M[rank][j]) / prev;
      }
      M[i][c] = 0;
    }
    prev = M[rank][c];
    ++rank;
  }
  return rank;
}

Eigen::MatrixXd PcaFit::project(const Eigen::MatrixXd& X) const {
  if (X.cols() != means.size()) throw DimensionError("PcaFit::project: column count mismatch");
  return (X.rowwise() - means.transpose()) * components.transpose();
}

Eigen::MatrixXd PcaFit::reconstruct(const Eigen::MatrixXd& scores) const {
  return (scores * components).rowwise() + means.transpose();
}

PcaFit pca_fit(const Eigen::MatrixXd& X, Index k) {
  if (k < 1 || k > X.cols()) {
    throw DimensionError("pca_fit: k=" + std::to_string(k) + " outside [1, " +
                         std::to_string(X.cols()) + "]");
  }
  if (X.rows() < 2) throw DimensionError("pca_fit: need at least two rows");
  require_finite(X, "pca_fit input");

  PcaFit fit;
  fit.means = X.colwise().mean();
  const Eigen::MatrixXd centred = X.rowwise() - fit.means.transpose();
  const Eigen::MatrixXd cov = (centred.transpose() * centred) / double(X.rows() - 1);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) throw NumericError("pca_fit: eigendecomposition failed");

  // Eigen returns ascending eigenvalues.
  const Index p = X.cols();
  fit.components.resize(k, p);
  fit.explained_variance.resize(k);
  for (Index i = 0; i < k; ++i) {
    const Index src = p - 1 - i;
    Eigen::VectorXd v = solver.eigenvectors().col(src);
    Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0) v = -v;
    fit.components.row(i) = v.transpose();
    fit.explained_variance(i) = std::max(0.0, solver.eigenvalues()(src));
  }
  fit.total_variance = cov.trace();
  return fit;
}

Eigen::VectorXd ridge_solve(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda,
                            Index intercept_col) {
  if (X.rows() != y.size()) throw DimensionError("ridge_solve: rows(X) != len(y)");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw NumericError("ridge_solve: lambda must be finite and non-negative");
  }
  require_finite(X, "ridge_solve design");
  require_finite(y, "ridge_solve target");

  Eigen::MatrixXd normal = X.transpose() * X;
  for (Index j = 0; j < normal.cols(); ++j) {
    if (j != intercept_col) normal(j, j) += lambda;
  }
  const Eigen::VectorXd rhs = X.transpose() * y;

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(normal);
  if (qr.rank() < normal.cols()) throw NumericError("ridge_solve: rank-deficient design");
  Eigen::VectorXd beta = qr.solve(rhs);
  require_finite(beta, "ridge_solve solution");
  return beta;
}

void require_finite(const Eigen::Ref<const Eigen::MatrixXd>& M, const char* what) {
  if (!M.allFinite()) throw NumericError(std::string(what) + " contains non-finite values");
}

}  // namespace pireduce
