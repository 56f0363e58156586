#include <doctest.h>

#include "oracles.hpp"
#include "pireduce/errors.hpp"
#include "pireduce/serialize.hpp"

using namespace pireduce;

TEST_CASE("matrix and vector documents round trip exactly") {
  Rng rng = make_rng(95, 0);
  std::normal_distribution<double> g(0.0, 1e3);
  Eigen::MatrixXd M(3, 4);
  for (Eigen::Index i = 0; i < M.size(); ++i) M.data()[i] = g(rng) / 7.0;
  CHECK(matrix_from_json(nlohmann::json::parse(to_json(M).dump())) == M);
  const Eigen::VectorXd v = M.col(2);
  CHECK(vector_from_json(nlohmann::json::parse(to_json(v).dump())) == v);
  CHECK_THROWS_AS(matrix_from_json({{"rows", 2}, {"cols", 1}, {"data", {{1.0}}}}), ConfigError);
}

TEST_CASE("training config: overrides and validation") {
  const MlpConfig c = mlp_config_from_json({{"epochs", 7}, {"seeds", {1, 2}}});
  CHECK(c.epochs == 7);
  CHECK(c.seeds == std::vector<std::uint64_t>{1, 2});
  CHECK(c.batch_size == 16);
  CHECK(mlp_config_from_json(to_json(c)).epochs == 7);
  CHECK_THROWS_AS(mlp_config_from_json({{"epoch", 7}}), ConfigError);
  CHECK_THROWS_AS(mlp_config_from_json({{"learning_rate", -1.0}}), ConfigError);
  CHECK_THROWS_AS(mlp_config_from_json({{"epochs", "many"}}), ConfigError);
}

TEST_CASE("pipelines reload with identical predictions") {
  const DatasetSchema schema = builtin_biofilter_schema();
  const PiBasis basis = derive_pi_basis(schema, *schema.preferred_base());
  MonomialModel law;
  law.intercept_log = 0.1;
  law.exponents = Eigen::Vector4d(-0.1, -0.3, 0.5, -0.1);
  const Dataset train = synth_generate(schema, 80, law, 0.05, 4);
  const Dataset test = synth_generate(widen_ranges(schema, 2.0), 30, law, 0.05, 5);
  ExperimentConfig cfg;
  cfg.mlp.epochs = 2;
  for (const auto& m : all_methods()) {
    CAPTURE(m.name());
    const FittedPipeline p = fit_pipeline(m, train, basis, cfg, 0).pipeline;
    const nlohmann::json doc = pipeline_to_json(p, cfg);
    CHECK(doc["format"] == "pireduce-model");
    CHECK(doc["version"] == kModelFormatVersion);
    CHECK(doc["config"]["training"]["epochs"] == 2);
    const FittedPipeline back = pipeline_from_json(nlohmann::json::parse(doc.dump()));
    const Eigen::VectorXd a = p.predict(test), b = back.predict(test);
    CHECK(((a - b).array().abs() / a.array().abs().max(1e-300)).maxCoeff() <= 1e-12);
    CHECK(pipeline_to_json(back, cfg).dump() == doc.dump());
  }
}

TEST_CASE("model documents are validated") {
  CHECK_THROWS_AS(pipeline_from_json({{"format", "other"}}), ConfigError);
  CHECK_THROWS_AS(pipeline_from_json({{"format", "pireduce-model"}, {"version", 99}}), ConfigError);
  CHECK_THROWS_AS(
      pipeline_from_json({{"format", "pireduce-model"}, {"version", 1}, {"method", "BP-LR"}, {"target", "y"}}),
      ConfigError);
}

TEST_CASE("json files") {
  const auto dir = oracle::scratch_dir("json");
  save_json(dir / "nested" / "a.json", {{"x", 1.5}});
  CHECK(load_json(dir / "nested" / "a.json")["x"] == 1.5);
  CHECK_THROWS_AS(load_json(dir / "missing.json"), ConfigError);
}
