#include "pireduce/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <exception>
#include <mutex>
#include <thread>

#include "pireduce/errors.hpp"
#include "pireduce/log.hpp"
#include "pireduce/serialize.hpp"

namespace pireduce {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

std::string Method::name() const {
  switch (reduction) {
    case Reduction::Pi: return predictor == Predictor::Nn ? "EnviroPiNet" : "BP-LR";
    case Reduction::Pca: return predictor == Predictor::Nn ? "PCA-NN" : "PCA-LR";
    case Reduction::Autoencoder: return predictor == Predictor::Nn ? "AE-NN" : "AE-LR";
  }
  return "?";
}

Method parse_method(const std::string& text) {
  std::string t;
  for (char c : text) t += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (t == "envioropinet" || t == "enviropinet" || t == "bp-nn" || t == "pi+nn") return {Reduction::Pi, Predictor::Nn};
  if (t == "bp-lr" || t == "pi+lr") return {Reduction::Pi, Predictor::Lr};
  if (t == "pca-nn" || t == "pc-nn" || t == "pca+nn") return {Reduction::Pca, Predictor::Nn};
  if (t == "pca-lr" || t == "pc-lr" || t == "pca+lr") return {Reduction::Pca, Predictor::Lr};
  if (t == "ae-nn" || t == "autoencoder-nn" || t == "autoencoder+nn") return {Reduction::Autoencoder, Predictor::Nn};
  if (t == "ae-lr" || t == "autoencoder-lr" || t == "autoencoder+lr") return {Reduction::Autoencoder, Predictor::Lr};
  throw ConfigError("unknown method '" + text + "'");
}

std::vector<Method> all_methods() {
  return {{Reduction::Pca, Predictor::Nn}, {Reduction::Pca, Predictor::Lr},
          {Reduction::Autoencoder, Predictor::Nn}, {Reduction::Autoencoder, Predictor::Lr},
          {Reduction::Pi, Predictor::Nn}, {Reduction::Pi, Predictor::Lr}};
}

namespace {

MatrixXd raw_matrix(const Dataset& data, const std::vector<std::string>& columns) {
  MatrixXd X(data.rows(), static_cast<Index>(columns.size()));
  for (std::size_t j = 0; j < columns.size(); ++j) X.col(static_cast<Index>(j)) = data.column(columns[j]);
  return X;
}

MatrixXd pi_groups(const Dataset& raw, const PiBasis& basis) {
  return nondimensionalize(raw, basis).values.leftCols(static_cast<Index>(basis.groups.size()));
}

// Raw features and their scaling for the data-driven reductions. Columns that
// do not vary in training carry no information and cannot be standardized.
std::vector<std::string> varying_independents(const Dataset& train) {
  std::vector<std::string> out;
  for (const auto& name : train.schema.independent_names()) {
    const VectorXd c = train.column(name);
    if ((c.array() != c(0)).any()) out.push_back(name);
  }
  return out;
}

}  // namespace

MatrixXd FittedPipeline::features(const Dataset& raw) const {
  switch (method.reduction) {
    case Reduction::Pi: {
      const MatrixXd U = pi_groups(raw, *basis);
      return method.predictor == Predictor::Lr ? U : feature_scaler.transform(U);
    }
    case Reduction::Pca:
    case Reduction::Autoencoder: {
      const MatrixXd Z = raw_scaler.transform(raw_matrix(raw, raw_columns));
      const MatrixXd reduced = pca ? pca->transform(Z) : autoencoder->encode(Z);
      const MatrixXd scaled = feature_scaler.transform(reduced);
      if (method.predictor == Predictor::Lr) return scaled.rowwise() + feature_shift.transpose();
      return scaled;
    }
  }
  return {};
}

VectorXd FittedPipeline::predict_model_target(const Dataset& raw) const {
  const MatrixXd F = features(raw);
  if (monomial) {
    // Out-of-range PCA/latent scores can fall below the training minimum;
    // clamp to keep the log defined.
    if (method.reduction != Reduction::Pi) return monomial->predict(F.cwiseMax(1e-12));
    return monomial->predict(F);
  }
  return mlp->predict(F);
}

VectorXd FittedPipeline::predict(const Dataset& raw) const {
  const VectorXd y = predict_model_target(raw);
  if (method.reduction == Reduction::Pi) return dimensionalize_target(y, raw, *basis);
  return y;
}

FitOutcome fit_pipeline(const Method& method, const Dataset& train, const std::optional<PiBasis>& basis,
                        const ExperimentConfig& config, std::uint64_t seed) {
  FitOutcome out;
  FittedPipeline& p = out.pipeline;
  p.method = method;
  p.target = train.schema.dependent().name;

  MatrixXd F;
  VectorXd y;
  if (method.reduction == Reduction::Pi) {
    if (!basis) throw ConfigError(method.name() + " needs a Pi basis");
    p.basis = basis;
    const Dataset pi = nondimensionalize(train, *basis);
    F = pi.values.leftCols(static_cast<Index>(basis->groups.size()));
    y = pi.values.col(pi.values.cols() - 1);
    if (method.predictor == Predictor::Nn) {
      p.feature_scaler = Standardizer::fit(F, basis->group_labels());
      F = p.feature_scaler.transform(F);
    }
  } else {
    p.raw_columns = varying_independents(train);
    p.raw_scaler = Standardizer::fit(raw_matrix(train, p.raw_columns), p.raw_columns);
    const MatrixXd Z = p.raw_scaler.transform(raw_matrix(train, p.raw_columns));
    MatrixXd reduced;
    if (method.reduction == Reduction::Pca) {
      p.pca = reduce_pca(Z, config.reduced_size);
      reduced = p.pca->transform(Z);
    } else {
      auto [ae, report] = train_autoencoder(Z, config.mlp, seed, config.reduced_size);
      p.autoencoder = std::move(ae);
      out.ae_report = std::move(report);
      reduced = p.autoencoder->encode(Z);
    }
    std::vector<std::string> names;
    for (Index j = 0; j < reduced.cols(); ++j) names.push_back("h" + std::to_string(j + 1));
    p.feature_scaler = Standardizer::fit(reduced, names);
    F = p.feature_scaler.transform(reduced);
    if (method.predictor == Predictor::Lr) {
      p.feature_shift = (1.0 - F.colwise().minCoeff().array()).matrix().transpose();
      F = F.rowwise() + p.feature_shift.transpose();
    }
    y = train.column(p.target);
  }

  std::vector<std::string> feature_names;
  if (method.reduction == Reduction::Pi) {
    feature_names = basis->group_labels();
  } else {
    for (Index j = 0; j < F.cols(); ++j) feature_names.push_back("h" + std::to_string(j + 1));
  }

  if (method.predictor == Predictor::Lr) {
    p.monomial = fit_monomial(F, y, feature_names, config.lambda_grid, config.lr_k_folds, seed);
  } else {
    auto [model, report] = train_mlp(F, y, config.mlp, seed);
    p.mlp = std::move(model);
    out.nn_report = std::move(report);
  }
  return out;
}

SeedResult run_single(const Method& method, const Dataset& train, const Dataset& test,
                      const std::optional<PiBasis>& basis, const ExperimentConfig& config, std::uint64_t seed) {
  FitOutcome fit = fit_pipeline(method, train, basis, config, seed);
  const FittedPipeline& p = fit.pipeline;

  SeedResult r;
  r.seed = seed;
  const VectorXd train_true = train.column(p.target);
  r.test_true = test.column(p.target);
  r.train = score_all(train_true, p.predict(train));
  r.test_pred = p.predict(test);
  r.test = score_all(r.test_true, r.test_pred);
  if (method.reduction == Reduction::Pi) {
    const Index target_col = static_cast<Index>(basis->groups.size());
    r.train_pi = score_all(nondimensionalize(train, *basis).values.col(target_col), p.predict_model_target(train));
    r.test_pi = score_all(nondimensionalize(test, *basis).values.col(target_col), p.predict_model_target(test));
  }
  r.nn_report = std::move(fit.nn_report);
  r.ae_report = std::move(fit.ae_report);
  r.artifact = pipeline_to_json(p, config);
  return r;
}

ComparisonRow summarize(const Method& method, std::vector<SeedResult> runs) {
  ComparisonRow row;
  row.method = method;
  for (const auto& r : runs) {
    row.train_r2 += r.train.r2;
    row.test_r2 += r.test.r2;
    row.train_smape += r.train.smape;
    row.test_smape += r.test.smape;
  }
  const double n = double(runs.size());
  row.train_r2 /= n;
  row.test_r2 /= n;
  row.train_smape /= n;
  row.test_smape /= n;
  row.runs = std::move(runs);
  return row;
}

ComparisonRow run_experiment(const Method& method, const Dataset& train, const Dataset& test,
                             const std::optional<PiBasis>& basis, const ExperimentConfig& config,
                             const std::vector<std::uint64_t>& seeds, int jobs) {
  if (seeds.empty()) throw ConfigError("run_experiment: no seeds");
  std::vector<SeedResult> runs(seeds.size());
  std::vector<std::exception_ptr> errors(seeds.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < seeds.size(); i = next++) {
      try {
        log::info(method.name() + ": seed " + std::to_string(seeds[i]));
        runs[i] = run_single(method, train, test, basis, config, seeds[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int threads = std::clamp<int>(jobs, 1, static_cast<int>(seeds.size()));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return summarize(method, std::move(runs));
}

}  // namespace pireduce
