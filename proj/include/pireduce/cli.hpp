#pragma once

// Batch front end: derive-pi, synth, run, report.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pireduce/experiment.hpp"
#include "pireduce/monomial.hpp"
#include "pireduce/schema.hpp"

namespace pireduce {

/// Synthetic data block of a run config.
struct SynthBlock {
  Eigen::Index n = 200;
  Eigen::Index n_test = 0;  // run only; 0 means no generated test split
  MonomialModel law;        // exponents in Pi group order
  double sigma = 0.0;
  std::uint64_t seed = 0;
  double range_scale = 1.0;
  double test_range_scale = 1.0;
};

/// Fully resolved configuration. Paths are absolute or relative to the working
/// directory once loaded.
struct RunConfig {
  std::optional<std::filesystem::path> schema_path;  // builtin biofilter schema when absent
  std::optional<std::vector<std::string>> base_subset;
  std::optional<std::filesystem::path> train_data;
  std::optional<std::filesystem::path> test_data;
  double holdout_fraction = 0.2;  // used when train_data is given without test_data
  std::uint64_t holdout_seed = 0;
  std::optional<SynthBlock> synth;
  std::vector<Method> methods = all_methods();
  ExperimentConfig experiment;
  std::filesystem::path out = "pireduce_out";
  int jobs = 1;
  bool force = false;
};

/// Reads a JSON config. Relative paths inside it resolve against the file's directory.
RunConfig load_run_config(const std::filesystem::path& path);
RunConfig run_config_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
nlohmann::json run_config_to_json(const RunConfig& config);

/// "0,1,2" or "0-6" or a mix.
std::vector<std::uint64_t> parse_seed_list(const std::string& text);

DatasetSchema resolve_schema(const RunConfig& config);

int cmd_derive_pi(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_synth(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_run(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_report(const std::filesystem::path& manifest, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches. Returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pireduce
