#include "pireduce/reducers.hpp"

#include <limits>

#include "pireduce/dataio.hpp"
#include "pireduce/errors.hpp"

namespace pireduce {

using Eigen::Index;
using Eigen::MatrixXd;

PcaReducer reduce_pca(const MatrixXd& X_train, Index k) { return PcaReducer{pca_fit(X_train, k)}; }

namespace {

Mlp make_autoencoder(Index d, Index latent, const MlpConfig& config, Rng& rng) {
  const Index h = config.units_per_layer;
  return Mlp::glorot({d, h, latent, h, d},
                     {Activation::Relu, Activation::Linear, Activation::Relu, Activation::Linear}, rng);
}

AutoencoderModel split(const Mlp& net) {
  const auto& L = net.layers();
  return AutoencoderModel{Mlp({L[0], L[1]}), Mlp({L[2], L[3]})};
}

}  // namespace

std::pair<AutoencoderModel, TrainReport> train_autoencoder(const MatrixXd& X, const MlpConfig& config,
                                                           std::uint64_t seed, Index latent) {
  config.validate();
  if (latent < 1) throw ConfigError("autoencoder latent size must be positive");
  const Index n = X.rows();
  const Index d = X.cols();

  TrainReport report;
  report.seed = seed;
  report.mean_val_r2 = std::numeric_limits<double>::quiet_NaN();
  const auto folds = kfold_indices(n, config.k_folds, seed);
  MatrixXd oof = MatrixXd::Zero(n, d);
  std::vector<Mlp> fold_nets;
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
    const MatrixXd Xv = X(val, Eigen::all);

    Rng init_rng = make_rng(seed, 300 + f);
    Rng shuffle_rng = make_rng(seed, 400 + f);
    Mlp net = make_autoencoder(d, latent, config, init_rng);
    train_network(net, Xt, Xt, config, shuffle_rng, [&](int epoch) {
      const MatrixXd rt = net.forward(Xt);
      const MatrixXd rv = net.forward(Xv);
      if (!rt.allFinite() || !rv.allFinite()) {
        throw Divergence("autoencoder diverged at epoch " + std::to_string(epoch), epoch);
      }
      report.history.push_back({static_cast<int>(f), epoch, mse(Xt.reshaped(), rt.reshaped()),
                                mse(Xv.reshaped(), rv.reshaped()), mae(Xt.reshaped(), rt.reshaped()),
                                mae(Xv.reshaped(), rv.reshaped())});
    });
    const MatrixXd rv = net.forward(Xv);
    oof(val, Eigen::all) = rv;
    fold_val_mse.push_back(mse(Xv.reshaped(), rv.reshaped()));
    if (!config.refit_full) fold_nets.push_back(std::move(net));
  }
  report.cv_scores.n = static_cast<std::size_t>(X.size());
  report.cv_scores.mse = mse(X.reshaped(), oof.reshaped());
  report.cv_scores.mae = mae(X.reshaped(), oof.reshaped());

  if (!config.refit_full) {
    std::size_t best = 0;
    for (std::size_t f = 1; f < fold_nets.size(); ++f) {
      if (fold_val_mse[f] < fold_val_mse[best]) best = f;
    }
    return {split(fold_nets[best]), std::move(report)};
  }
  Rng init_rng = make_rng(seed, 300 + folds.size());
  Rng shuffle_rng = make_rng(seed, 400 + folds.size());
  Mlp net = make_autoencoder(d, latent, config, init_rng);
  train_network(net, X, X, config, shuffle_rng);
  return {split(net), std::move(report)};
}

}  // namespace pireduce
