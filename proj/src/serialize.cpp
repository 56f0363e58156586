#include "pireduce/serialize.hpp"

#include <cmath>
#include <algorithm>
#include <fstream>
#include <limits>

#include "pireduce/errors.hpp"

namespace pireduce {

using nlohmann::json;
using Eigen::Index;

namespace {

constexpr const char* kModelFormat = "pireduce-model";

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

double number_from(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

std::string activation_name(Activation a) { return a == Activation::Relu ? "relu" : "linear"; }

Activation parse_activation(const std::string& s) {
  if (s == "relu") return Activation::Relu;
  if (s == "linear") return Activation::Linear;
  throw ConfigError("unknown activation '" + s + "'");
}

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ConfigError(std::string("model document: missing '") + key + "'");
  return j.at(key);
}

}  // namespace

json to_json(const Eigen::MatrixXd& M) {
  json rows = json::array();
  for (Index r = 0; r < M.rows(); ++r) {
    json row = json::array();
    for (Index c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
    rows.push_back(std::move(row));
  }
  return {{"rows", M.rows()}, {"cols", M.cols()}, {"data", std::move(rows)}};
}

json to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  const Index rows = field(j, "rows").get<Index>();
  const Index cols = field(j, "cols").get<Index>();
  const json& data = field(j, "data");
  if (!data.is_array() || static_cast<Index>(data.size()) != rows) throw ConfigError("matrix: row count mismatch");
  Eigen::MatrixXd M(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const json& row = data[static_cast<std::size_t>(r)];
    if (static_cast<Index>(row.size()) != cols) throw ConfigError("matrix: column count mismatch");
    for (Index c = 0; c < cols; ++c) M(r, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  return M;
}

Eigen::VectorXd vector_from_json(const json& j) {
  if (!j.is_array()) throw ConfigError("vector: expected an array");
  Eigen::VectorXd v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Index>(i)) = j[i].get<double>();
  return v;
}

json to_json(const Standardizer& s) {
  return {{"columns", s.columns()}, {"means", to_json(s.means())}, {"stds", to_json(s.stds())}};
}

Standardizer standardizer_from_json(const json& j) {
  return Standardizer(vector_from_json(field(j, "means")), vector_from_json(field(j, "stds")),
                      j.value("columns", std::vector<std::string>{}));
}

json to_json(const PcaFit& p) {
  return {{"components", to_json(p.components)},
          {"means", to_json(p.means)},
          {"explained_variance", to_json(p.explained_variance)},
          {"total_variance", p.total_variance}};
}

PcaFit pca_from_json(const json& j) {
  PcaFit p;
  p.components = matrix_from_json(field(j, "components"));
  p.means = vector_from_json(field(j, "means"));
  p.explained_variance = vector_from_json(field(j, "explained_variance"));
  p.total_variance = field(j, "total_variance").get<double>();
  return p;
}

json to_json(const Mlp& net) {
  json layers = json::array();
  for (const auto& l : net.layers()) {
    layers.push_back({{"weights", to_json(l.weights)},
                      {"bias", to_json(l.bias)},
                      {"activation", activation_name(l.activation)}});
  }
  return {{"layers", std::move(layers)}};
}

Mlp mlp_from_json(const json& j) {
  std::vector<DenseLayer> layers;
  for (const auto& l : field(j, "layers")) {
    DenseLayer d;
    d.weights = matrix_from_json(field(l, "weights"));
    d.bias = vector_from_json(field(l, "bias"));
    d.activation = parse_activation(field(l, "activation").get<std::string>());
    if (d.bias.size() != d.weights.rows()) throw ConfigError("network layer: bias size mismatch");
    if (!layers.empty() && layers.back().weights.rows() != d.weights.cols()) {
      throw ConfigError("network layer: width mismatch");
    }
    layers.push_back(std::move(d));
  }
  return Mlp(std::move(layers));
}

json to_json(const MlpModel& m) {
  return {{"network", to_json(m.network)}, {"target_mean", m.target_mean}, {"target_scale", m.target_scale}};
}

MlpModel mlp_model_from_json(const json& j) {
  MlpModel m;
  m.network = mlp_from_json(field(j, "network"));
  m.target_mean = field(j, "target_mean").get<double>();
  m.target_scale = field(j, "target_scale").get<double>();
  return m;
}

json to_json(const MonomialModel& m) {
  json cv = json::array();
  for (double x : m.cv_mse) cv.push_back(number_or_null(x));
  return {{"intercept_log", m.intercept_log},
          {"exponents", to_json(m.exponents)},
          {"feature_names", m.feature_names},
          {"lambda", m.lambda},
          {"lambda_grid", m.lambda_grid},
          {"cv_mse", std::move(cv)}};
}

MonomialModel monomial_from_json(const json& j) {
  MonomialModel m;
  m.intercept_log = field(j, "intercept_log").get<double>();
  m.exponents = vector_from_json(field(j, "exponents"));
  m.feature_names = field(j, "feature_names").get<std::vector<std::string>>();
  m.lambda = j.value("lambda", 0.0);
  m.lambda_grid = j.value("lambda_grid", std::vector<double>{});
  if (j.contains("cv_mse")) {
    for (const auto& x : j.at("cv_mse")) m.cv_mse.push_back(number_from(x));
  }
  if (static_cast<Index>(m.feature_names.size()) != m.exponents.size()) {
    throw ConfigError("monomial: one feature name per exponent required");
  }
  return m;
}

json to_json(const AutoencoderModel& m) { return {{"encoder", to_json(m.encoder)}, {"decoder", to_json(m.decoder)}}; }

AutoencoderModel autoencoder_from_json(const json& j) {
  return {mlp_from_json(field(j, "encoder")), mlp_from_json(field(j, "decoder"))};
}

json to_json(const MlpConfig& c) {
  return {{"batch_size", c.batch_size},
          {"learning_rate", c.learning_rate},
          {"units_per_layer", c.units_per_layer},
          {"hidden_layers", c.hidden_layers},
          {"epochs", c.epochs},
          {"k_folds", c.k_folds},
          {"l2_penalty", c.l2_penalty},
          {"seeds", c.seeds},
          {"adam_beta1", c.adam_beta1},
          {"adam_beta2", c.adam_beta2},
          {"adam_epsilon", c.adam_epsilon},
          {"refit_full", c.refit_full},
          {"standardize_target", c.standardize_target},
          {"zero_init_output", c.zero_init_output}};
}

MlpConfig mlp_config_from_json(const json& j, MlpConfig c) {
  if (!j.is_object()) throw ConfigError("training config must be an object");
  static const std::vector<std::string> known{"batch_size",  "learning_rate", "units_per_layer", "hidden_layers",
                                              "epochs",      "k_folds",       "l2_penalty",      "seeds",
                                              "adam_beta1",  "adam_beta2",    "adam_epsilon",    "refit_full",
                                              "standardize_target", "zero_init_output"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(known.begin(), known.end(), it.key()) == known.end()) {
      throw ConfigError("unknown training option '" + it.key() + "'");
    }
  }
  try {
    c.batch_size = j.value("batch_size", c.batch_size);
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.units_per_layer = j.value("units_per_layer", c.units_per_layer);
    c.hidden_layers = j.value("hidden_layers", c.hidden_layers);
    c.epochs = j.value("epochs", c.epochs);
    c.k_folds = j.value("k_folds", c.k_folds);
    c.l2_penalty = j.value("l2_penalty", c.l2_penalty);
    c.seeds = j.value("seeds", c.seeds);
    c.adam_beta1 = j.value("adam_beta1", c.adam_beta1);
    c.adam_beta2 = j.value("adam_beta2", c.adam_beta2);
    c.adam_epsilon = j.value("adam_epsilon", c.adam_epsilon);
    c.refit_full = j.value("refit_full", c.refit_full);
    c.standardize_target = j.value("standardize_target", c.standardize_target);
    c.zero_init_output = j.value("zero_init_output", c.zero_init_output);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("training config: ") + e.what());
  }
  c.validate();
  return c;
}

json to_json(const ScoreSet& s) {
  return {{"r2", number_or_null(s.r2)},
          {"smape", number_or_null(s.smape)},
          {"mse", number_or_null(s.mse)},
          {"mae", number_or_null(s.mae)},
          {"pearson_r", number_or_null(s.pearson_r)},
          {"pearson_p", number_or_null(s.pearson_p)},
          {"n", s.n}};
}

json pipeline_to_json(const FittedPipeline& p, const ExperimentConfig& config) {
  json doc{{"format", kModelFormat},
           {"version", kModelFormatVersion},
           {"method", p.method.name()},
           {"target", p.target},
           {"config",
            {{"training", to_json(config.mlp)},
             {"lambda_grid", config.lambda_grid},
             {"lr_k_folds", config.lr_k_folds},
             {"reduced_size", config.reduced_size}}}};
  if (p.basis) doc["pi_basis"] = pi_basis_to_json(*p.basis);
  if (!p.raw_columns.empty()) {
    doc["raw_columns"] = p.raw_columns;
    doc["raw_scaler"] = to_json(p.raw_scaler);
  }
  if (p.pca) doc["pca"] = to_json(p.pca->fit);
  if (p.autoencoder) doc["autoencoder"] = to_json(*p.autoencoder);
  if (p.feature_scaler.means().size() > 0) doc["feature_scaler"] = to_json(p.feature_scaler);
  if (p.feature_shift.size() > 0) doc["feature_shift"] = to_json(p.feature_shift);
  if (p.monomial) doc["monomial"] = to_json(*p.monomial);
  if (p.mlp) doc["mlp"] = to_json(*p.mlp);
  return doc;
}

FittedPipeline pipeline_from_json(const json& doc) {
  if (doc.value("format", std::string()) != kModelFormat) throw ConfigError("not a pireduce model document");
  const int version = doc.value("version", 0);
  if (version != kModelFormatVersion) {
    throw ConfigError("unsupported model format version " + std::to_string(version));
  }
  FittedPipeline p;
  p.method = parse_method(field(doc, "method").get<std::string>());
  p.target = field(doc, "target").get<std::string>();
  if (doc.contains("pi_basis")) p.basis = pi_basis_from_json(doc.at("pi_basis"));
  if (doc.contains("raw_columns")) {
    p.raw_columns = doc.at("raw_columns").get<std::vector<std::string>>();
    p.raw_scaler = standardizer_from_json(field(doc, "raw_scaler"));
  }
  if (doc.contains("pca")) p.pca = PcaReducer{pca_from_json(doc.at("pca"))};
  if (doc.contains("autoencoder")) p.autoencoder = autoencoder_from_json(doc.at("autoencoder"));
  if (doc.contains("feature_scaler")) p.feature_scaler = standardizer_from_json(doc.at("feature_scaler"));
  if (doc.contains("feature_shift")) p.feature_shift = vector_from_json(doc.at("feature_shift"));
  if (doc.contains("monomial")) p.monomial = monomial_from_json(doc.at("monomial"));
  if (doc.contains("mlp")) p.mlp = mlp_model_from_json(doc.at("mlp"));

  const bool pi = p.method.reduction == Reduction::Pi;
  if (pi && !p.basis) throw ConfigError("model document: Pi method without pi_basis");
  if (p.method.reduction == Reduction::Pca && !p.pca) throw ConfigError("model document: missing pca");
  if (p.method.reduction == Reduction::Autoencoder && !p.autoencoder) {
    throw ConfigError("model document: missing autoencoder");
  }
  if (p.method.predictor == Predictor::Lr ? !p.monomial : !p.mlp) {
    throw ConfigError("model document: missing predictor");
  }
  return p;
}

void save_json(const std::filesystem::path& path, const json& doc) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << doc.dump(2) << '\n';
  if (!out) throw Error("write failed: " + path.string());
}

json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace pireduce
