#pragma once

// Independent reference implementations used only by the tests. Nothing here
// calls into the library's numerics or metrics.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "pireduce/numerics.hpp"
#include "pireduce/random.hpp"

namespace oracle {

using pireduce::Rational;
using pireduce::RationalMatrix;

inline Rational random_rational(pireduce::Rng& rng, int max_num = 9, int max_den = 6) {
  std::uniform_int_distribution<int> num(-max_num, max_num);
  std::uniform_int_distribution<int> den(1, max_den);
  return Rational(num(rng)) / Rational(den(rng));
}

inline RationalMatrix random_rational_matrix(pireduce::Rng& rng, Eigen::Index r, Eigen::Index c, int max_num = 9,
                                             int max_den = 6) {
  RationalMatrix A(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) A(i, j) = random_rational(rng, max_num, max_den);
  return A;
}

inline pireduce::RationalVector matvec(const RationalMatrix& A, const pireduce::RationalVector& x) {
  pireduce::RationalVector out(A.rows());
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    Rational s(0);
    for (Eigen::Index j = 0; j < A.cols(); ++j) s += A(i, j) * x(j);
    out(i) = s;
  }
  return out;
}

/// Laplace expansion along the first row.
inline Rational determinant(const RationalMatrix& A) {
  const Eigen::Index n = A.rows();
  if (n == 0) return Rational(1);
  if (n == 1) return A(0, 0);
  Rational det(0);
  for (Eigen::Index j = 0; j < n; ++j) {
    if (A(0, j) == 0) continue;
    RationalMatrix minor(n - 1, n - 1);
    for (Eigen::Index r = 1; r < n; ++r) {
      Eigen::Index cc = 0;
      for (Eigen::Index c = 0; c < n; ++c) {
        if (c == j) continue;
        minor(r - 1, cc++) = A(r, c);
      }
    }
    const Rational term = A(0, j) * determinant(minor);
    det += (j % 2 == 0) ? term : Rational(-term);
  }
  return det;
}

inline void combinations(Eigen::Index n, Eigen::Index k, std::vector<std::vector<Eigen::Index>>& out) {
  std::vector<bool> pick(static_cast<std::size_t>(n), false);
  std::fill(pick.begin(), pick.begin() + k, true);
  do {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index i = 0; i < n; ++i)
      if (pick[static_cast<std::size_t>(i)]) idx.push_back(i);
    out.push_back(idx);
  } while (std::prev_permutation(pick.begin(), pick.end()));
}

/// Largest k with a nonzero k x k minor.
inline Eigen::Index rank_by_minors(const RationalMatrix& A) {
  for (Eigen::Index k = std::min(A.rows(), A.cols()); k > 0; --k) {
    std::vector<std::vector<Eigen::Index>> rows, cols;
    combinations(A.rows(), k, rows);
    combinations(A.cols(), k, cols);
    for (const auto& r : rows) {
      for (const auto& c : cols) {
        RationalMatrix sub(k, k);
        for (Eigen::Index i = 0; i < k; ++i)
          for (Eigen::Index j = 0; j < k; ++j) sub(i, j) = A(r[static_cast<std::size_t>(i)], c[static_cast<std::size_t>(j)]);
        if (determinant(sub) != 0) return k;
      }
    }
  }
  return 0;
}

// ---- metrics, written out longhand over std::vector ------------------------

inline double mean(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / double(v.size());
}

inline double r2(const std::vector<double>& y, const std::vector<double>& f) {
  const double m = mean(y);
  double res = 0, tot = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    res += (y[i] - f[i]) * (y[i] - f[i]);
    tot += (y[i] - m) * (y[i] - m);
  }
  return 1 - res / tot;
}

inline double smape(const std::vector<double>& y, const std::vector<double>& f) {
  double s = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double d = std::fabs(y[i]) + std::fabs(f[i]);
    if (d != 0) s += std::fabs(y[i] - f[i]) / d;
  }
  return 100 * s / double(y.size());
}

inline double mse(const std::vector<double>& y, const std::vector<double>& f) {
  double s = 0;
  for (std::size_t i = 0; i < y.size(); ++i) s += (y[i] - f[i]) * (y[i] - f[i]);
  return s / double(y.size());
}

inline double mae(const std::vector<double>& y, const std::vector<double>& f) {
  double s = 0;
  for (std::size_t i = 0; i < y.size(); ++i) s += std::fabs(y[i] - f[i]);
  return s / double(y.size());
}

inline double pearson_r(const std::vector<double>& y, const std::vector<double>& f) {
  const double my = mean(y), mf = mean(f);
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    sxy += (y[i] - my) * (f[i] - mf);
    sxx += (y[i] - my) * (y[i] - my);
    syy += (f[i] - mf) * (f[i] - mf);
  }
  return sxy / std::sqrt(sxx * syy);
}

/// Two-sided Student-t p-value by Simpson integration of the density over [|t|, T].
inline double t_two_sided_p(double t, double dof) {
  const double c = std::exp(std::lgamma((dof + 1) / 2) - std::lgamma(dof / 2)) / std::sqrt(dof * M_PI);
  auto pdf = [&](double x) { return c * std::pow(1 + x * x / dof, -(dof + 1) / 2); };
  // Substitute x = |t| / u on (0, 1] to integrate the tail to infinity.
  const int n = 20000;
  const double a = std::fabs(t);
  if (a == 0) return 1.0;
  auto g = [&](double u) { return u <= 0 ? 0.0 : pdf(a / u) * a / (u * u); };
  double s = g(0) + g(1);
  for (int i = 1; i < n; ++i) s += g(double(i) / n) * (i % 2 ? 4 : 2);
  return 2 * s / (3.0 * n);
}

inline std::vector<double> to_vec(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("pireduce_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace oracle
