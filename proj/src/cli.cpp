#include "pireduce/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "pireduce/dataio.hpp"
#include "pireduce/errors.hpp"
#include "pireduce/log.hpp"
#include "pireduce/pi_engine.hpp"
#include "pireduce/serialize.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace pireduce {

namespace {

constexpr const char* kManifestFormat = "pireduce-run-manifest";

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

fs::path resolve(const fs::path& p, const fs::path& base) {
  if (p.is_absolute() || base.empty()) return p;
  return base / p;
}

template <class T>
T get_as(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

void reject_unknown(const json& j, const std::vector<std::string>& known, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(known.begin(), known.end(), it.key()) == known.end()) {
      throw ConfigError("unknown key '" + it.key() + "' in " + where);
    }
  }
}

SynthBlock synth_from_json(const json& j) {
  reject_unknown(j, {"n", "n_test", "law", "sigma", "seed", "range_scale", "test_range_scale"}, "synth");
  SynthBlock s;
  if (j.contains("n")) s.n = get_as<Eigen::Index>(j, "n");
  if (j.contains("n_test")) s.n_test = get_as<Eigen::Index>(j, "n_test");
  if (j.contains("sigma")) s.sigma = get_as<double>(j, "sigma");
  if (j.contains("seed")) s.seed = get_as<std::uint64_t>(j, "seed");
  if (j.contains("range_scale")) s.range_scale = get_as<double>(j, "range_scale");
  if (j.contains("test_range_scale")) s.test_range_scale = get_as<double>(j, "test_range_scale");
  if (!j.contains("law")) throw ConfigError("synth block needs a 'law' with 'exponents'");
  const json& law = j.at("law");
  reject_unknown(law, {"intercept_log", "exponents"}, "synth.law");
  s.law.intercept_log = law.value("intercept_log", 0.0);
  s.law.exponents = vector_from_json(law.at("exponents"));
  if (s.n < 1 || s.n_test < 0) throw ConfigError("synth: n must be positive and n_test non-negative");
  return s;
}

json synth_to_json(const SynthBlock& s) {
  return {{"n", s.n},
          {"n_test", s.n_test},
          {"law", {{"intercept_log", s.law.intercept_log}, {"exponents", to_json(s.law.exponents)}}},
          {"sigma", s.sigma},
          {"seed", s.seed},
          {"range_scale", s.range_scale},
          {"test_range_scale", s.test_range_scale}};
}

// Refuses to touch an existing artifact unless forced.
void claim_output(const fs::path& file, bool force) {
  if (fs::exists(file) && !force) {
    throw ConfigError(file.string() + " already exists; pass --force to replace it");
  }
}

PiBasis basis_for(const DatasetSchema& schema, const RunConfig& config) {
  const auto& preferred = config.base_subset ? config.base_subset : schema.preferred_base();
  return derive_pi_basis(schema, select_base_subset(schema, preferred));
}

MonomialModel law_for(const SynthBlock& s, const PiBasis& basis) {
  MonomialModel law = s.law;
  law.feature_names = basis.group_labels();
  return law;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed: " + path.string());
}

std::string iso_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string file_label(const Method& m) {
  std::string s = m.name();
  for (char& c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-') c = '_';
  }
  return s;
}

void append_history(std::ostringstream& csv, const std::string& method, const TrainReport& report) {
  for (const auto& h : report.history) {
    csv << method << ',' << report.seed << ',' << h.epoch << ',' << (h.fold + 1) << ',' << fmt(h.train_mse) << ','
        << fmt(h.val_mse) << ',' << fmt(h.train_mae) << ',' << fmt(h.val_mae) << '\n';
  }
}

void append_scores(std::ostringstream& csv, const std::string& method, std::uint64_t seed, const char* split,
                   const ScoreSet& s) {
  csv << method << ',' << seed << ',' << split << ',' << fmt(s.r2) << ',' << fmt(s.smape) << ',' << fmt(s.mse) << ','
      << fmt(s.mae) << ',' << fmt(s.pearson_r) << ',' << fmt(s.pearson_p) << '\n';
}

}  // namespace

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(text);
  std::string item;
  auto number = [&](const std::string& s) -> std::uint64_t {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (s.empty() || used != s.size() || s[0] == '-') throw ConfigError("bad seed '" + s + "' in --seed-list");
    return v;
  };
  while (std::getline(ss, item, ',')) {
    item.erase(std::remove_if(item.begin(), item.end(), ::isspace), item.end());
    if (item.empty()) continue;
    const auto dash = item.find('-', 1);
    if (dash == std::string::npos) {
      seeds.push_back(number(item));
    } else {
      const std::uint64_t a = number(item.substr(0, dash));
      const std::uint64_t b = number(item.substr(dash + 1));
      if (b < a) throw ConfigError("descending seed range '" + item + "'");
      for (std::uint64_t s = a; s <= b; ++s) seeds.push_back(s);
    }
  }
  if (seeds.empty()) throw ConfigError("empty seed list");
  return seeds;
}

RunConfig run_config_from_json(const json& doc, const fs::path& base_dir) {
  reject_unknown(doc,
                 {"schema", "base_subset", "train_data", "test_data", "holdout", "synth", "methods", "training",
                  "lambda_grid", "lr_k_folds", "reduced_size", "seeds", "out", "jobs"},
                 "config");
  RunConfig c;
  if (doc.contains("schema")) c.schema_path = resolve(get_as<std::string>(doc, "schema"), base_dir);
  if (doc.contains("base_subset")) c.base_subset = get_as<std::vector<std::string>>(doc, "base_subset");
  if (doc.contains("train_data")) c.train_data = resolve(get_as<std::string>(doc, "train_data"), base_dir);
  if (doc.contains("test_data")) c.test_data = resolve(get_as<std::string>(doc, "test_data"), base_dir);
  if (doc.contains("holdout")) {
    const json& h = doc.at("holdout");
    reject_unknown(h, {"fraction", "seed"}, "holdout");
    c.holdout_fraction = h.value("fraction", c.holdout_fraction);
    c.holdout_seed = h.value("seed", c.holdout_seed);
  }
  if (doc.contains("synth")) c.synth = synth_from_json(doc.at("synth"));
  if (doc.contains("methods")) {
    c.methods.clear();
    for (const auto& m : get_as<std::vector<std::string>>(doc, "methods")) {
      const Method parsed = parse_method(m);
      if (std::find(c.methods.begin(), c.methods.end(), parsed) != c.methods.end()) {
        throw ConfigError("method '" + m + "' listed twice");
      }
      c.methods.push_back(parsed);
    }
    if (c.methods.empty()) throw ConfigError("config selects no methods");
  }
  if (doc.contains("training")) c.experiment.mlp = mlp_config_from_json(doc.at("training"), c.experiment.mlp);
  if (doc.contains("lambda_grid")) c.experiment.lambda_grid = get_as<std::vector<double>>(doc, "lambda_grid");
  if (doc.contains("lr_k_folds")) c.experiment.lr_k_folds = get_as<int>(doc, "lr_k_folds");
  if (doc.contains("reduced_size")) c.experiment.reduced_size = get_as<Eigen::Index>(doc, "reduced_size");
  if (doc.contains("seeds")) c.experiment.mlp.seeds = get_as<std::vector<std::uint64_t>>(doc, "seeds");
  if (doc.contains("out")) c.out = resolve(get_as<std::string>(doc, "out"), base_dir);
  if (doc.contains("jobs")) c.jobs = get_as<int>(doc, "jobs");

  if (c.experiment.lambda_grid.empty()) throw ConfigError("lambda_grid is empty");
  for (double l : c.experiment.lambda_grid) {
    if (!(l >= 0.0) || !std::isfinite(l)) throw ConfigError("lambda_grid values must be finite and >= 0");
  }
  if (c.experiment.lr_k_folds < 2) throw ConfigError("lr_k_folds must be at least 2");
  if (c.experiment.reduced_size < 1) throw ConfigError("reduced_size must be positive");
  if (c.experiment.mlp.seeds.empty()) throw ConfigError("seeds is empty");
  if (c.jobs < 1) throw ConfigError("jobs must be at least 1");
  if (!(c.holdout_fraction > 0.0 && c.holdout_fraction < 1.0)) throw ConfigError("holdout fraction must be in (0, 1)");
  if (c.train_data && c.synth) throw ConfigError("give either train_data or synth, not both");
  return c;
}

RunConfig load_run_config(const fs::path& path) {
  return run_config_from_json(load_json(path), fs::absolute(path).parent_path());
}

json run_config_to_json(const RunConfig& c) {
  json doc;
  if (c.schema_path) doc["schema"] = c.schema_path->string();
  if (c.base_subset) doc["base_subset"] = *c.base_subset;
  if (c.train_data) doc["train_data"] = c.train_data->string();
  if (c.test_data) doc["test_data"] = c.test_data->string();
  doc["holdout"] = {{"fraction", c.holdout_fraction}, {"seed", c.holdout_seed}};
  if (c.synth) doc["synth"] = synth_to_json(*c.synth);
  json methods = json::array();
  for (const auto& m : c.methods) methods.push_back(m.name());
  doc["methods"] = std::move(methods);
  doc["training"] = to_json(c.experiment.mlp);
  doc["lambda_grid"] = c.experiment.lambda_grid;
  doc["lr_k_folds"] = c.experiment.lr_k_folds;
  doc["reduced_size"] = c.experiment.reduced_size;
  doc["seeds"] = c.experiment.mlp.seeds;
  doc["out"] = c.out.string();
  doc["jobs"] = c.jobs;
  return doc;
}

DatasetSchema resolve_schema(const RunConfig& config) {
  return config.schema_path ? load_schema(*config.schema_path) : builtin_biofilter_schema();
}

int cmd_derive_pi(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const DatasetSchema schema = resolve_schema(config);
  PiBasis basis;
  try {
    basis = basis_for(schema, config);
  } catch (const DegenerateDimensions& e) {
    err << "error: degenerate dimensions: " << e.what() << '\n';
    return 2;
  }
  const fs::path file = config.out / "pi_basis.json";
  claim_output(file, config.force);
  save_json(file, pi_basis_to_json(basis));

  out << "base subset:";
  for (const auto& b : basis.base_subset) out << ' ' << b;
  out << '\n';
  for (const auto& g : basis.groups) out << "  " << g.label << " = " << g.formula() << '\n';
  out << "  Ypi = " << basis.target_group.formula() << '\n';
  out << "wrote " << file.string() << '\n';
  return 0;
}

int cmd_synth(const RunConfig& config, std::ostream& out, std::ostream&) {
  if (!config.synth) throw ConfigError("synth needs a 'synth' block with a law");
  const DatasetSchema schema = resolve_schema(config);
  for (const auto& name : schema.independent_names()) {
    if (!schema.column(name).declared_range) throw ConfigError("synth: column '" + name + "' has no declared range");
  }
  const PiBasis basis = basis_for(schema, config);
  const SynthBlock& s = *config.synth;
  SynthOptions opt;
  opt.range_scale = s.range_scale;
  opt.base_subset = basis.base_subset;
  const Dataset data = synth_generate(schema, s.n, law_for(s, basis), s.sigma, s.seed, opt);

  const fs::path file = config.out / "synthetic.csv";
  claim_output(file, config.force);
  fs::create_directories(config.out);
  save_csv(file, data);
  out << "wrote " << data.rows() << " rows to " << file.string() << '\n';
  return 0;
}

int cmd_run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const auto started = std::chrono::steady_clock::now();
  const DatasetSchema schema = resolve_schema(config);

  static const std::vector<std::string> artifacts{"comparison.csv",        "loss_history.csv",
                                                  "autoencoder_history.csv", "pi_target_metrics.csv",
                                                  "run_manifest.json"};
  for (const auto& a : artifacts) claim_output(config.out / a, config.force);
  if (fs::exists(config.out)) {
    for (const auto& entry : fs::directory_iterator(config.out)) {
      const std::string name = entry.path().filename().string();
      const bool ours = name.rfind("scatter_", 0) == 0 || name == "models" ||
                        std::find(artifacts.begin(), artifacts.end(), name) != artifacts.end();
      if (ours && !config.force) throw ConfigError(entry.path().string() + " already exists; pass --force");
      if (ours) fs::remove_all(entry.path());
    }
  }
  fs::create_directories(config.out / "models");

  std::optional<PiBasis> basis;
  std::string basis_error;
  try {
    basis = basis_for(schema, config);
  } catch (const Error& e) {
    basis_error = e.what();
  }

  Dataset train, test;
  std::string source;
  if (config.synth) {
    if (!basis) throw DegenerateDimensions("synthetic data needs a Pi basis: " + basis_error);
    const SynthBlock& s = *config.synth;
    SynthOptions opt;
    opt.base_subset = basis->base_subset;
    opt.range_scale = s.range_scale;
    train = synth_generate(schema, s.n, law_for(s, *basis), s.sigma, s.seed, opt);
    if (s.n_test > 0) {
      opt.range_scale = s.range_scale * s.test_range_scale;
      test = synth_generate(schema, s.n_test, law_for(s, *basis), s.sigma, s.seed + 1, opt);
    } else {
      auto split = holdout_split(train, config.holdout_fraction, config.holdout_seed);
      train = std::move(split.train);
      test = std::move(split.test);
    }
    source = "synthetic";
  } else if (config.train_data) {
    train = load_csv(*config.train_data, schema);
    if (config.test_data) {
      test = load_csv(*config.test_data, schema);
    } else {
      auto split = holdout_split(train, config.holdout_fraction, config.holdout_seed);
      train = std::move(split.train);
      test = std::move(split.test);
    }
    source = config.train_data->string();
  } else {
    throw ConfigError("run needs train_data or a synth block");
  }

  std::ostringstream comparison, history, ae_history, pi_metrics;
  comparison << "method,train_r2,test_r2,train_smape,test_smape\n";
  history << "method,seed,epoch,fold,train_mse,val_mse,train_mae,val_mae\n";
  ae_history << "method,seed,epoch,fold,train_mse,val_mse,train_mae,val_mae\n";
  pi_metrics << "method,seed,split,r2,smape,mse,mae,pearson_r,pearson_p\n";

  json method_docs = json::array();
  std::vector<std::string> failures;
  for (const Method& method : config.methods) {
    const std::string name = method.name();
    json doc{{"method", name}};
    try {
      if (method.reduction == Reduction::Pi && !basis) throw DegenerateDimensions(basis_error);
      log::info("running " + name);
      const ComparisonRow row =
          run_experiment(method, train, test, basis, config.experiment, config.experiment.mlp.seeds, config.jobs);

      comparison << name << ',' << fmt(row.train_r2) << ',' << fmt(row.test_r2) << ',' << fmt(row.train_smape) << ','
                 << fmt(row.test_smape) << '\n';
      std::ostringstream scatter;
      scatter << "seed,y_true,y_pred\n";
      json per_seed = json::array();
      for (const auto& r : row.runs) {
        if (r.nn_report) append_history(history, name, *r.nn_report);
        if (r.ae_report) append_history(ae_history, name, *r.ae_report);
        if (r.train_pi) append_scores(pi_metrics, name, r.seed, "train", *r.train_pi);
        if (r.test_pi) append_scores(pi_metrics, name, r.seed, "test", *r.test_pi);
        for (Eigen::Index i = 0; i < r.test_true.size(); ++i) {
          scatter << r.seed << ',' << fmt(r.test_true(i)) << ',' << fmt(r.test_pred(i)) << '\n';
        }
        save_json(config.out / "models" / (file_label(method) + "_seed" + std::to_string(r.seed) + ".json"),
                  r.artifact);
        per_seed.push_back({{"seed", r.seed}, {"train", to_json(r.train)}, {"test", to_json(r.test)}});
      }
      write_text(config.out / ("scatter_" + file_label(method) + ".csv"), scatter.str());
      doc["status"] = "ok";
      doc["train_r2"] = row.train_r2;
      doc["test_r2"] = row.test_r2;
      doc["train_smape"] = row.train_smape;
      doc["test_smape"] = row.test_smape;
      doc["per_seed"] = std::move(per_seed);
    } catch (const std::exception& e) {
      doc["status"] = "failed";
      doc["error"] = e.what();
      failures.push_back(name + ": " + e.what());
      log::error(name + " failed: " + e.what());
    }
    method_docs.push_back(std::move(doc));
  }

  write_text(config.out / "comparison.csv", comparison.str());
  write_text(config.out / "loss_history.csv", history.str());
  write_text(config.out / "autoencoder_history.csv", ae_history.str());
  write_text(config.out / "pi_target_metrics.csv", pi_metrics.str());

  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  json manifest{{"format", kManifestFormat},
                {"version", 1},
                {"timestamp", iso_timestamp()},
                {"wall_time_seconds", wall},
                {"config", run_config_to_json(config)},
                {"seeds", config.experiment.mlp.seeds},
                {"data", {{"source", source}, {"train_rows", train.rows()}, {"test_rows", test.rows()}}},
                {"methods", std::move(method_docs)}};
  if (basis) manifest["pi_basis"] = pi_basis_to_json(*basis);
  save_json(config.out / "run_manifest.json", manifest);

  std::ifstream table(config.out / "comparison.csv");
  out << table.rdbuf();
  if (!failures.empty()) {
    err << failures.size() << " method(s) failed:\n";
    for (const auto& f : failures) err << "  " << f << '\n';
    return 1;
  }
  return 0;
}

int cmd_report(const fs::path& manifest_path, std::ostream& out, std::ostream& err) {
  const json manifest = load_json(manifest_path);
  if (manifest.value("format", std::string()) != kManifestFormat) {
    throw ConfigError(manifest_path.string() + " is not a run manifest");
  }
  auto cell = [](const json& doc, const char* key) {
    if (!doc.contains(key) || doc.at(key).is_null()) return std::string("nan");
    std::ostringstream s;
    s << std::fixed << std::setprecision(4) << doc.at(key).get<double>();
    return s.str();
  };
  out << std::left << std::setw(14) << "Method" << std::right << std::setw(12) << "Train R2" << std::setw(12)
      << "Test R2" << std::setw(14) << "Train sMAPE" << std::setw(14) << "Test sMAPE" << '\n';
  int failed = 0;
  for (const auto& m : manifest.at("methods")) {
    const std::string name = m.value("method", std::string("?"));
    out << std::left << std::setw(14) << name << std::right;
    if (m.value("status", std::string()) != "ok") {
      out << "  failed: " << m.value("error", std::string()) << '\n';
      ++failed;
      continue;
    }
    out << std::setw(12) << cell(m, "train_r2") << std::setw(12) << cell(m, "test_r2") << std::setw(14)
        << cell(m, "train_smape") << std::setw(14) << cell(m, "test_smape") << '\n';
  }
  out << "seeds:";
  for (const auto& s : manifest.at("seeds")) out << ' ' << s.get<std::uint64_t>();
  out << "\nwall time: " << std::fixed << std::setprecision(1) << manifest.value("wall_time_seconds", 0.0) << " s ("
      << manifest.value("timestamp", std::string()) << ")\n";
  if (failed) err << failed << " method(s) failed in this run\n";
  return 0;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Buckingham Pi feature reduction and model comparison"};
  app.require_subcommand(1);

  std::string config_path, out_dir, seed_list, manifest_path;
  int jobs = 0;
  bool force = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON run config")->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory");
    sub->add_flag("--force", force, "replace existing artifacts");
  };
  CLI::App* derive = app.add_subcommand("derive-pi", "derive Pi groups and write pi_basis.json");
  add_common(derive);
  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic dataset");
  add_common(synth);
  synth->add_option("--seed-list", seed_list, "generator seed (first entry is used)");
  CLI::App* run = app.add_subcommand("run", "train and evaluate the selected methods");
  add_common(run);
  run->add_option("--seed-list", seed_list, "seeds, e.g. 0-6 or 0,3,5");
  run->add_option("--jobs", jobs, "concurrent seeds")->check(CLI::PositiveNumber);
  CLI::App* report = app.add_subcommand("report", "print the comparison table from a run manifest");
  report->add_option("manifest", manifest_path, "run_manifest.json");
  report->add_option("--out", out_dir, "run directory containing run_manifest.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (report->parsed()) {
      if (manifest_path.empty()) {
        if (out_dir.empty()) throw ConfigError("report needs a manifest path or --out");
        manifest_path = (fs::path(out_dir) / "run_manifest.json").string();
      }
      return cmd_report(manifest_path, out, err);
    }

    RunConfig config = config_path.empty() ? RunConfig{} : load_run_config(config_path);
    if (!out_dir.empty()) config.out = out_dir;
    if (force) config.force = true;
    if (jobs > 0) config.jobs = jobs;
    if (!seed_list.empty()) {
      const auto seeds = parse_seed_list(seed_list);
      config.experiment.mlp.seeds = seeds;
      if (config.synth && synth->parsed()) config.synth->seed = seeds.front();
    }

    if (derive->parsed()) return cmd_derive_pi(config, out, err);
    if (synth->parsed()) return cmd_synth(config, out, err);
    return cmd_run(config, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace pireduce
