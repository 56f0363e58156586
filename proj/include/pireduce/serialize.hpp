#pragma once

// JSON documents for fitted models. Doubles are written with round-trip
// precision, so a reload reproduces predictions exactly.

#include <filesystem>

#include <json.hpp>

#include "pireduce/dataio.hpp"
#include "pireduce/experiment.hpp"
#include "pireduce/metrics.hpp"
#include "pireduce/mlp.hpp"
#include "pireduce/monomial.hpp"
#include "pireduce/reducers.hpp"

namespace pireduce {

inline constexpr int kModelFormatVersion = 1;

nlohmann::json to_json(const Eigen::MatrixXd& M);
nlohmann::json to_json(const Eigen::VectorXd& v);
Eigen::MatrixXd matrix_from_json(const nlohmann::json& j);
Eigen::VectorXd vector_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Standardizer& s);
Standardizer standardizer_from_json(const nlohmann::json& j);

nlohmann::json to_json(const PcaFit& p);
PcaFit pca_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Mlp& net);
Mlp mlp_from_json(const nlohmann::json& j);

nlohmann::json to_json(const MlpModel& m);
MlpModel mlp_model_from_json(const nlohmann::json& j);

nlohmann::json to_json(const MonomialModel& m);
MonomialModel monomial_from_json(const nlohmann::json& j);

nlohmann::json to_json(const AutoencoderModel& m);
AutoencoderModel autoencoder_from_json(const nlohmann::json& j);

nlohmann::json to_json(const MlpConfig& c);
MlpConfig mlp_config_from_json(const nlohmann::json& j, MlpConfig base = {});

nlohmann::json to_json(const ScoreSet& s);

/// Versioned model artifact: config echo, Pi basis, scalers, reducer and predictor.
nlohmann::json pipeline_to_json(const FittedPipeline& p, const ExperimentConfig& config);
FittedPipeline pipeline_from_json(const nlohmann::json& doc);

void save_json(const std::filesystem::path& path, const nlohmann::json& doc);
nlohmann::json load_json(const std::filesystem::path& path);

}  // namespace pireduce
