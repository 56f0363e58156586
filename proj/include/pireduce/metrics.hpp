#pragma once

// Regression scores. All functions accept any Eigen dense vector expression.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>

#include <Eigen/Core>

#include "pireduce/errors.hpp"

namespace pireduce {

struct PearsonResult {
  double r = 0.0;
  double p = 1.0;
};

struct ScoreSet {
  double r2 = std::numeric_limits<double>::quiet_NaN();
  double smape = std::numeric_limits<double>::quiet_NaN();
  double mse = std::numeric_limits<double>::quiet_NaN();
  double mae = std::numeric_limits<double>::quiet_NaN();
  double pearson_r = std::numeric_limits<double>::quiet_NaN();
  double pearson_p = std::numeric_limits<double>::quiet_NaN();
  std::size_t n = 0;
};

namespace detail {

template <class A, class B>
void require_same_length(const Eigen::DenseBase<A>& y, const Eigen::DenseBase<B>& yhat, Eigen::Index min_len,
                         const char* what) {
  if (y.size() != yhat.size()) throw DimensionError(std::string(what) + ": length mismatch");
  if (y.size() < min_len) {
    throw UndefinedScore(std::string(what) + ": needs at least " + std::to_string(min_len) + " values");
  }
}

/// Two-sided p-value of Student's t with `dof` degrees of freedom.
double student_t_two_sided_p(double t, double dof);

}  // namespace detail

/// 1 - SS_res / SS_tot. Negative when worse than predicting the mean.
template <class A, class B>
double r_squared(const Eigen::DenseBase<A>& y, const Eigen::DenseBase<B>& yhat) {
  detail::require_same_length(y, yhat, 2, "r_squared");
  const double mean = y.derived().mean();
  const double ss_tot = (y.derived().array() - mean).square().sum();
  if (ss_tot == 0.0) throw UndefinedScore("r_squared: observed values are constant");
  const double ss_res = (y.derived().array() - yhat.derived().array()).square().sum();
  return 1.0 - ss_res / ss_tot;
}

/// (100 / n) * sum |y - yhat| / (|y| + |yhat|), in [0, 100]. No factor 2 in the
/// numerator; terms with y = yhat = 0 contribute 0.
template <class A, class B>
double smape(const Eigen::DenseBase<A>& y, const Eigen::DenseBase<B>& yhat) {
  detail::require_same_length(y, yhat, 1, "smape");
  double total = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double a = y.derived()(i);
    const double b = yhat.derived()(i);
    const double denom = std::abs(a) + std::abs(b);
    if (denom > 0.0) total += std::abs(a - b) / denom;
  }
  return 100.0 * total / double(y.size());
}

template <class A, class B>
double mse(const Eigen::DenseBase<A>& y, const Eigen::DenseBase<B>& yhat) {
  detail::require_same_length(y, yhat, 1, "mse");
  return (y.derived().array() - yhat.derived().array()).square().mean();
}

template <class A, class B>
double mae(const Eigen::DenseBase<A>& y, const Eigen::DenseBase<B>& yhat) {
  detail::require_same_length(y, yhat, 1, "mae");
  return (y.derived().array() - yhat.derived().array()).abs().mean();
}

/// Sample correlation with a two-sided p-value from t = r sqrt((n-2)/(1-r^2)).
template <class A, class B>
PearsonResult pearson(const Eigen::DenseBase<A>& y, const Eigen::DenseBase<B>& yhat) {
  detail::require_same_length(y, yhat, 3, "pearson");
  const auto dy = (y.derived().array() - y.derived().mean()).eval();
  const auto dh = (yhat.derived().array() - yhat.derived().mean()).eval();
  const double syy = dy.square().sum();
  const double shh = dh.square().sum();
  if (syy == 0.0 || shh == 0.0) throw UndefinedScore("pearson: constant input");
  PearsonResult out;
  out.r = std::clamp((dy * dh).sum() / std::sqrt(syy * shh), -1.0, 1.0);
  const double dof = double(y.size() - 2);
  if (std::abs(out.r) >= 1.0) {
    out.p = 0.0;
  } else {
    const double t = out.r * std::sqrt(dof / (1.0 - out.r * out.r));
    out.p = detail::student_t_two_sided_p(t, dof);
  }
  return out;
}

/// Every score that is defined for the inputs; undefined ones stay NaN.
template <class A, class B>
ScoreSet score_all(const Eigen::DenseBase<A>& y, const Eigen::DenseBase<B>& yhat) {
  ScoreSet s;
  s.n = static_cast<std::size_t>(y.size());
  s.smape = smape(y, yhat);
  s.mse = mse(y, yhat);
  s.mae = mae(y, yhat);
  try {
    s.r2 = r_squared(y, yhat);
  } catch (const UndefinedScore&) {
  }
  try {
    const PearsonResult p = pearson(y, yhat);
    s.pearson_r = p.r;
    s.pearson_p = p.p;
  } catch (const UndefinedScore&) {
  }
  return s;
}

}  // namespace pireduce
