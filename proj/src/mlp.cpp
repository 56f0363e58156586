#include "pireduce/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "pireduce/dataio.hpp"
#include "pireduce/errors.hpp"

namespace pireduce {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

void activate(MatrixXd& Z, Activation a) {
  if (a == Activation::Relu) Z = Z.cwiseMax(0.0);
}

}  // namespace

// ---- Mlp -------------------------------------------------------------------

Mlp::Mlp(std::vector<DenseLayer> layers) : layers_(std::move(layers)) {
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& L = layers_[l];
    if (L.bias.size() != L.weights.rows()) throw DimensionError("Mlp: bias length differs from layer width");
    if (l > 0 && L.weights.cols() != layers_[l - 1].weights.rows()) {
      throw DimensionError("Mlp: layer " + std::to_string(l) + " input width mismatch");
    }
  }
}

Mlp Mlp::glorot(const std::vector<Index>& sizes, const std::vector<Activation>& activations, Rng& rng) {
  if (sizes.size() < 2 || activations.size() != sizes.size() - 1) {
    throw DimensionError("Mlp::glorot: need one activation per layer");
  }
  std::vector<DenseLayer> layers;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    const Index in = sizes[l];
    const Index out = sizes[l + 1];
    const double limit = std::sqrt(6.0 / double(in + out));
    std::uniform_real_distribution<double> unif(-limit, limit);
    DenseLayer layer;
    layer.weights.resize(out, in);
    for (Index j = 0; j < in; ++j) {
      for (Index i = 0; i < out; ++i) layer.weights(i, j) = unif(rng);
    }
    layer.bias = VectorXd::Zero(out);
    layer.activation = activations[l];
    layers.push_back(std::move(layer));
  }
  return Mlp(std::move(layers));
}

MatrixXd Mlp::forward(const MatrixXd& X) const {
  if (X.cols() != input_size()) throw DimensionError("Mlp::forward: input width mismatch");
  MatrixXd A = X;
  for (const auto& L : layers_) {
    MatrixXd Z = (A * L.weights.transpose()).rowwise() + L.bias.transpose();
    activate(Z, L.activation);
    A = std::move(Z);
  }
  return A;
}

Index Mlp::input_size() const { return layers_.empty() ? 0 : layers_.front().weights.cols(); }
Index Mlp::output_size() const { return layers_.empty() ? 0 : layers_.back().weights.rows(); }

Index Mlp::parameter_count() const {
  Index n = 0;
  for (const auto& L : layers_) n += L.weights.size() + L.bias.size();
  return n;
}

VectorXd Mlp::flatten() const {
  VectorXd p(parameter_count());
  Index at = 0;
  for (const auto& L : layers_) {
    p.segment(at, L.weights.size()) = L.weights.reshaped();
    at += L.weights.size();
    p.segment(at, L.bias.size()) = L.bias;
    at += L.bias.size();
  }
  return p;
}

void Mlp::assign(const VectorXd& params) {
  if (params.size() != parameter_count()) throw DimensionError("Mlp::assign: parameter count mismatch");
  Index at = 0;
  for (auto& L : layers_) {
    L.weights.reshaped() = params.segment(at, L.weights.size());
    at += L.weights.size();
    L.bias = params.segment(at, L.bias.size());
    at += L.bias.size();
  }
}

VectorXd MlpGradients::flatten() const {
  Index n = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) n += weights[l].size() + biases[l].size();
  VectorXd g(n);
  Index at = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    g.segment(at, weights[l].size()) = weights[l].reshaped();
    at += weights[l].size();
    g.segment(at, biases[l].size()) = biases[l];
    at += biases[l].size();
  }
  return g;
}

double loss_and_gradients(const Mlp& net, const MatrixXd& X, const MatrixXd& Y, double l2, MlpGradients* grads) {
  const auto& layers = net.layers();
  if (layers.empty()) throw DimensionError("loss_and_gradients: empty network");
  if (X.rows() != Y.rows() || Y.cols() != net.output_size()) {
    throw DimensionError("loss_and_gradients: target shape mismatch");
  }

  // activations[0] = X, activations[l + 1] = output of layer l
  std::vector<MatrixXd> activations;
  activations.reserve(layers.size() + 1);
  activations.push_back(X);
  for (const auto& L : layers) {
    MatrixXd Z = (activations.back() * L.weights.transpose()).rowwise() + L.bias.transpose();
    activate(Z, L.activation);
    activations.push_back(std::move(Z));
  }

  const MatrixXd residual = activations.back() - Y;
  const double count = double(residual.size());
  double loss = residual.squaredNorm() / count;
  for (const auto& L : layers) loss += l2 * L.weights.squaredNorm();
  if (grads == nullptr) return loss;

  grads->weights.resize(layers.size());
  grads->biases.resize(layers.size());
  MatrixXd delta = (2.0 / count) * residual;
  for (std::size_t l = layers.size(); l-- > 0;) {
    const auto& L = layers[l];
    if (L.activation == Activation::Relu) {
      delta = delta.cwiseProduct((activations[l + 1].array() > 0.0).cast<double>().matrix());
    }
    grads->weights[l] = delta.transpose() * activations[l] + 2.0 * l2 * L.weights;
    grads->biases[l] = delta.colwise().sum().transpose();
    if (l > 0) delta = delta * L.weights;
  }
  return loss;
}

// ---- Adam ------------------------------------------------------------------

AdamOptimizer::AdamOptimizer(double learning_rate, double beta1, double beta2, double epsilon)
    : lr_(learning_rate), beta1_(beta1), beta2_(beta2), epsilon_(epsilon) {}

void AdamOptimizer::step(Mlp& net, const MlpGradients& grads) {
  auto& layers = net.layers();
  if (mw_.empty()) {
    for (const auto& L : layers) {
      mw_.push_back(MatrixXd::Zero(L.weights.rows(), L.weights.cols()));
      vw_.push_back(MatrixXd::Zero(L.weights.rows(), L.weights.cols()));
      mb_.push_back(VectorXd::Zero(L.bias.size()));
      vb_.push_back(VectorXd::Zero(L.bias.size()));
    }
  }
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, double(t_));
  const double c2 = 1.0 - std::pow(beta2_, double(t_));
  for (std::size_t l = 0; l < layers.size(); ++l) {
    mw_[l] = beta1_ * mw_[l] + (1.0 - beta1_) * grads.weights[l];
    vw_[l] = beta2_ * vw_[l] + (1.0 - beta2_) * grads.weights[l].cwiseAbs2();
    layers[l].weights.array() -= lr_ * (mw_[l].array() / c1) / ((vw_[l].array() / c2).sqrt() + epsilon_);

    mb_[l] = beta1_ * mb_[l] + (1.0 - beta1_) * grads.biases[l];
    vb_[l] = beta2_ * vb_[l] + (1.0 - beta2_) * grads.biases[l].cwiseAbs2();
    layers[l].bias.array() -= lr_ * (mb_[l].array() / c1) / ((vb_[l].array() / c2).sqrt() + epsilon_);
  }
}

// ---- Training --------------------------------------------------------------

void MlpConfig::validate() const {
  if (batch_size < 1 || units_per_layer < 1 || hidden_layers < 0 || epochs < 1 || k_folds < 2) {
    throw ConfigError("MLP config: sizes must be positive and k_folds >= 2");
  }
  if (!(learning_rate > 0.0) || !(l2_penalty >= 0.0)) throw ConfigError("MLP config: bad learning rate or L2 penalty");
  if (seeds.empty()) throw ConfigError("MLP config: at least one seed is required");
}

VectorXd MlpModel::predict(const MatrixXd& X) const {
  return (network.forward(X).col(0).array() * target_scale + target_mean).matrix();
}

Mlp make_regressor(Index inputs, Index outputs, const MlpConfig& config, Rng& rng) {
  std::vector<Index> sizes{inputs};
  std::vector<Activation> acts;
  for (int h = 0; h < config.hidden_layers; ++h) {
    sizes.push_back(config.units_per_layer);
    acts.push_back(Activation::Relu);
  }
  sizes.push_back(outputs);
  acts.push_back(Activation::Linear);
  Mlp net = Mlp::glorot(sizes, acts, rng);
  if (config.zero_init_output) net.layers().back().weights.setZero();
  return net;
}

void train_network(Mlp& net, const MatrixXd& X, const MatrixXd& Y, const MlpConfig& config, Rng& shuffle_rng,
                   const std::function<void(int)>& on_epoch) {
  config.validate();
  const Index n = X.rows();
  AdamOptimizer adam(config.learning_rate, config.adam_beta1, config.adam_beta2, config.adam_epsilon);
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  MlpGradients grads;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    for (Index start = 0; start < n; start += config.batch_size) {
      const Index stop = std::min<Index>(n, start + config.batch_size);
      const std::vector<Index> batch(order.begin() + start, order.begin() + stop);
      const double loss = loss_and_gradients(net, X(batch, Eigen::all), Y(batch, Eigen::all), config.l2_penalty, &grads);
      if (!std::isfinite(loss)) {
        throw Divergence("training diverged: non-finite loss at epoch " + std::to_string(epoch), epoch);
      }
      adam.step(net, grads);
    }
    if (on_epoch) on_epoch(epoch);
  }
}

namespace {

struct TargetScale {
  double mean = 0.0;
  double scale = 1.0;
};

TargetScale fit_target_scale(const VectorXd& y, bool enabled) {
  if (!enabled || y.size() < 2) return {};
  const double mean = y.mean();
  const double sd = std::sqrt((y.array() - mean).square().sum() / double(y.size() - 1));
  return {mean, sd > 0.0 ? sd : 1.0};
}

}  // namespace

std::pair<MlpModel, TrainReport> train_mlp(const MatrixXd& X, const VectorXd& y, const MlpConfig& config,
                                           std::uint64_t seed) {
  config.validate();
  if (X.rows() != y.size()) throw DimensionError("train_mlp: rows(X) != len(y)");
  const Index n = X.rows();

  TrainReport report;
  report.seed = seed;
  const auto folds = kfold_indices(n, config.k_folds, seed);
  VectorXd oof = VectorXd::Zero(n);
  std::vector<MlpModel> fold_models;
  std::vector<double> fold_val_mse;

  for (std::size_t f = 0; f < folds.size(); ++f) {
    const auto& val = folds[f];
    std::vector<bool> held(static_cast<std::size_t>(n), false);
    for (Index r : val) held[static_cast<std::size_t>(r)] = true;
    std::vector<Index> train;
    for (Index r = 0; r < n; ++r) {
      if (!held[static_cast<std::size_t>(r)]) train.push_back(r);
    }
    const MatrixXd Xt = X(train, Eigen::all);
    const VectorXd yt = y(train);
    const MatrixXd Xv = X(val, Eigen::all);
    const VectorXd yv = y(val);

    const TargetScale ts = fit_target_scale(yt, config.standardize_target);
    const MatrixXd Yt = ((yt.array() - ts.mean) / ts.scale).matrix();

    Rng init_rng = make_rng(seed, 100 + f);
    Rng shuffle_rng = make_rng(seed, 200 + f);
    MlpModel model{make_regressor(X.cols(), 1, config, init_rng), ts.mean, ts.scale};

    VectorXd last_val_pred;
    train_network(model.network, Xt, Yt, config, shuffle_rng, [&](int epoch) {
      const VectorXd pt = model.predict(Xt);
      const VectorXd pv = model.predict(Xv);
      if (!pt.allFinite() || !pv.allFinite()) {
        throw Divergence("training diverged: non-finite prediction at epoch " + std::to_string(epoch), epoch);
      }
      report.history.push_back({static_cast<int>(f), epoch, mse(yt, pt), mse(yv, pv), mae(yt, pt), mae(yv, pv)});
      if (epoch == config.epochs) last_val_pred = pv;
    });
    oof(val) = last_val_pred;
    fold_val_mse.push_back(mse(yv, last_val_pred));
    if (!config.refit_full) fold_models.push_back(model);
    double r2 = std::numeric_limits<double>::quiet_NaN();
    try {
      r2 = r_squared(yv, last_val_pred);
    } catch (const UndefinedScore&) {
    }
    report.fold_val_r2.push_back(r2);
  }

  double sum = 0.0;
  int defined = 0;
  for (double r2 : report.fold_val_r2) {
    if (std::isfinite(r2)) {
      sum += r2;
      ++defined;
    }
  }
  report.mean_val_r2 = defined ? sum / defined : std::numeric_limits<double>::quiet_NaN();
  report.cv_scores = score_all(y, oof);

  MlpModel final_model;
  if (config.refit_full) {
    const TargetScale ts = fit_target_scale(y, config.standardize_target);
    Rng init_rng = make_rng(seed, 100 + folds.size());
    Rng shuffle_rng = make_rng(seed, 200 + folds.size());
    final_model = MlpModel{make_regressor(X.cols(), 1, config, init_rng), ts.mean, ts.scale};
    const MatrixXd Y = ((y.array() - ts.mean) / ts.scale).matrix();
    train_network(final_model.network, X, Y, config, shuffle_rng);
  } else {
    // Fold model with the lowest final validation MSE.
    std::size_t best = 0;
    for (std::size_t f = 1; f < fold_models.size(); ++f) {
      if (fold_val_mse[f] < fold_val_mse[best]) best = f;
    }
    final_model = std::move(fold_models[best]);
  }
  return {std::move(final_model), std::move(report)};
}

}  // namespace pireduce
