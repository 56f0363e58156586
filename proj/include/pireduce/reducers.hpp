#pragma once

// Data-driven reductions used as baselines against the Pi groups.

#include <cstdint>
#include <utility>

#include <Eigen/Core>

#include "pireduce/mlp.hpp"
#include "pireduce/numerics.hpp"

namespace pireduce {

struct PcaReducer {
  PcaFit fit;

  Eigen::MatrixXd transform(const Eigen::MatrixXd& X) const { return fit.project(X); }
};

/// First k principal components of (already standardized) training data.
PcaReducer reduce_pca(const Eigen::MatrixXd& X_train, Eigen::Index k);
inline PcaReducer reduce_pca4(const Eigen::MatrixXd& X_train) { return reduce_pca(X_train, 4); }

struct AutoencoderModel {
  Mlp encoder;  // d -> hidden (ReLU) -> latent (linear)
  Mlp decoder;  // latent -> hidden (ReLU) -> d (linear)

  Eigen::MatrixXd encode(const Eigen::MatrixXd& X) const { return encoder.forward(X); }
  Eigen::MatrixXd reconstruct(const Eigen::MatrixXd& X) const { return decoder.forward(encoder.forward(X)); }
  Eigen::Index latent_size() const { return encoder.output_size(); }
};

/// Symmetric d -> units -> latent -> units -> d autoencoder trained on reconstruction
/// MSE with the optimizer, epochs, L2 and fold protocol of `config`. The report's
/// curves are reconstruction errors.
std::pair<AutoencoderModel, TrainReport> train_autoencoder(const Eigen::MatrixXd& X, const MlpConfig& config,
                                                           std::uint64_t seed, Eigen::Index latent = 4);

}  // namespace pireduce
