#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "pireduce/dataio.hpp"
#include "pireduce/metrics.hpp"
#include "pireduce/mlp.hpp"
#include "pireduce/monomial.hpp"
#include "pireduce/pi_engine.hpp"
#include "pireduce/reducers.hpp"

namespace pireduce {

enum class Reduction { Pi, Pca, Autoencoder };
enum class Predictor { Nn, Lr };

struct Method {
  Reduction reduction = Reduction::Pi;
  Predictor predictor = Predictor::Nn;

  /// EnviroPiNet, BP-LR, PCA-NN, PCA-LR, AE-NN, AE-LR
  std::string name() const;
  friend bool operator==(const Method&, const Method&) = default;
};

/// Accepts the canonical names, the long forms (Autoencoder-NN, PC-LR, ...) and
/// "reduction+model" pairs such as "pi+lr". Throws ConfigError otherwise.
Method parse_method(const std::string& text);
/// Table order: PCA-NN, PCA-LR, AE-NN, AE-LR, EnviroPiNet, BP-LR.
std::vector<Method> all_methods();

struct ExperimentConfig {
  MlpConfig mlp;
  std::vector<double> lambda_grid = default_lambda_grid();
  int lr_k_folds = 5;
  Eigen::Index reduced_size = 4;  // PCA components and autoencoder latent width
};

/// Everything fitted on the training rows for one method and seed. Nothing in
/// here is ever computed from evaluation data.
struct FittedPipeline {
  Method method;
  std::string target;

  std::optional<PiBasis> basis;          // Pi reduction
  std::vector<std::string> raw_columns;  // PCA / autoencoder inputs
  Standardizer raw_scaler;
  std::optional<PcaReducer> pca;
  std::optional<AutoencoderModel> autoencoder;

  Standardizer feature_scaler;   // unused by BP-LR
  Eigen::VectorXd feature_shift; // LR on PCA/latent features: x' = z + shift, shift = 1 - min_train(z)

  std::optional<MonomialModel> monomial;
  std::optional<MlpModel> mlp;

  /// Reduced features as fed to the predictor.
  Eigen::MatrixXd features(const Dataset& raw) const;
  /// Prediction of the model's own target (Ypi for the Pi methods, the dependent otherwise).
  Eigen::VectorXd predict_model_target(const Dataset& raw) const;
  /// Prediction of the dependent variable, in its declared unit.
  Eigen::VectorXd predict(const Dataset& raw) const;
};

struct FitOutcome {
  FittedPipeline pipeline;
  std::optional<TrainReport> nn_report;
  std::optional<TrainReport> ae_report;
};

FitOutcome fit_pipeline(const Method& method, const Dataset& train, const std::optional<PiBasis>& basis,
                        const ExperimentConfig& config, std::uint64_t seed);

struct SeedResult {
  std::uint64_t seed = 0;
  ScoreSet train;  // on the dependent variable
  ScoreSet test;
  std::optional<ScoreSet> train_pi;  // on Ypi, Pi methods only
  std::optional<ScoreSet> test_pi;
  std::optional<TrainReport> nn_report;
  std::optional<TrainReport> ae_report;
  Eigen::VectorXd test_true;
  Eigen::VectorXd test_pred;
  nlohmann::json artifact;  // serialized FittedPipeline
};

struct ComparisonRow {
  Method method;
  double train_r2 = 0.0;
  double test_r2 = 0.0;
  double train_smape = 0.0;
  double test_smape = 0.0;
  std::vector<SeedResult> runs;
};

SeedResult run_single(const Method& method, const Dataset& train, const Dataset& test,
                      const std::optional<PiBasis>& basis, const ExperimentConfig& config, std::uint64_t seed);

/// Runs every seed (up to `jobs` concurrently) and averages the scores.
ComparisonRow run_experiment(const Method& method, const Dataset& train, const Dataset& test,
                             const std::optional<PiBasis>& basis, const ExperimentConfig& config,
                             const std::vector<std::uint64_t>& seeds, int jobs = 1);

ComparisonRow summarize(const Method& method, std::vector<SeedResult> runs);

}  // namespace pireduce
