#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "pireduce/metrics.hpp"
#include "pireduce/random.hpp"

namespace pireduce {

enum class Activation { Relu, Linear };

struct DenseLayer {
  Eigen::MatrixXd weights;  // out x in
  Eigen::VectorXd bias;     // out
  Activation activation = Activation::Linear;
};

/// Fully connected feedforward network. Inputs and outputs are row-per-sample.
class Mlp {
 public:
  Mlp() = default;
  explicit Mlp(std::vector<DenseLayer> layers);

  /// Glorot-uniform weights, zero biases. `sizes` includes the input width, so
  /// {4, 64, 64, 1} has three layers; `activations` has one entry per layer.
  static Mlp glorot(const std::vector<Eigen::Index>& sizes, const std::vector<Activation>& activations, Rng& rng);

  Eigen::MatrixXd forward(const Eigen::MatrixXd& X) const;

  const std::vector<DenseLayer>& layers() const { return layers_; }
  std::vector<DenseLayer>& layers() { return layers_; }
  Eigen::Index input_size() const;
  Eigen::Index output_size() const;
  Eigen::Index parameter_count() const;

  /// Weights (column-major) then bias, layer by layer.
  Eigen::VectorXd flatten() const;
  void assign(const Eigen::VectorXd& params);

 private:
  std::vector<DenseLayer> layers_;
};

struct MlpGradients {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;

  Eigen::VectorXd flatten() const;
};

/// mean((f(X) - Y)^2) + l2 * sum_l ||W_l||_F^2 (biases unpenalised). Fills
/// `grads` with the analytic gradient when non-null.
double loss_and_gradients(const Mlp& net, const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, double l2,
                          MlpGradients* grads);

class AdamOptimizer {
 public:
  explicit AdamOptimizer(double learning_rate, double beta1 = 0.9, double beta2 = 0.999, double epsilon = 1e-8);
  void step(Mlp& net, const MlpGradients& grads);
  long steps() const { return t_; }

 private:
  double lr_, beta1_, beta2_, epsilon_;
  long t_ = 0;
  std::vector<Eigen::MatrixXd> mw_, vw_;
  std::vector<Eigen::VectorXd> mb_, vb_;
};

/// Training hyperparameters. Defaults are the reference protocol.
struct MlpConfig {
  int batch_size = 16;
  double learning_rate = 1e-4;
  int units_per_layer = 64;
  int hidden_layers = 2;
  int epochs = 50;
  int k_folds = 5;
  double l2_penalty = 0.01;
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4, 5, 6};

  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;

  bool refit_full = true;          // final model trained on every row after CV
  bool standardize_target = true;  // network sees (y - mean) / std of its training rows
  bool zero_init_output = false;

  /// Throws ConfigError on non-positive sizes or rates.
  void validate() const;
};

struct EpochRecord {
  int fold = 0;
  int epoch = 0;  // 1-based
  double train_mse = 0.0;
  double val_mse = 0.0;
  double train_mae = 0.0;
  double val_mae = 0.0;
};

/// Learning curves in the units of the network's target, without the L2 term.
struct TrainReport {
  std::uint64_t seed = 0;
  std::vector<EpochRecord> history;  // fold-major, epochs x folds entries
  std::vector<double> fold_val_r2;   // final epoch, per fold
  double mean_val_r2 = 0.0;
  ScoreSet cv_scores;                // pooled out-of-fold predictions at the final epoch
};

struct MlpModel {
  Mlp network;
  double target_mean = 0.0;
  double target_scale = 1.0;

  Eigen::VectorXd predict(const Eigen::MatrixXd& X) const;
};

/// Architecture in -> units x hidden_layers (ReLU) -> out (linear).
Mlp make_regressor(Eigen::Index inputs, Eigen::Index outputs, const MlpConfig& config, Rng& rng);

/// Mini-batch Adam on the full (X, Y). Calls `on_epoch(epoch)` after each epoch.
/// Throws Divergence with the epoch index if the loss stops being finite.
void train_network(Mlp& net, const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, const MlpConfig& config,
                   Rng& shuffle_rng, const std::function<void(int)>& on_epoch = {});

/// k-fold cross-validated training, then (by default) a refit on all rows.
/// Inputs are used as given; callers pass standardized features. Deterministic
/// for a given seed.
std::pair<MlpModel, TrainReport> train_mlp(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                           const MlpConfig& config, std::uint64_t seed);

}  // namespace pireduce
