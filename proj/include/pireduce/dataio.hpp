#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "pireduce/monomial.hpp"
#include "pireduce/pi_engine.hpp"
#include "pireduce/schema.hpp"

namespace pireduce {

// ---- CSV -------------------------------------------------------------------
//
// Header row of column names (any order; reordered to schema order) and an
// optional trailing "provenance" column. Every cell must parse as a finite real.

Dataset read_csv(std::istream& in, const DatasetSchema& schema, const std::string& source = "<stream>");
Dataset load_csv(const std::filesystem::path& path, const DatasetSchema& schema);

/// Values are written with 17 significant digits, so a reload is value-exact.
void write_csv(std::ostream& out, const Dataset& data);
void save_csv(const std::filesystem::path& path, const Dataset& data);

// ---- Standardisation -------------------------------------------------------

class Standardizer {
 public:
  Standardizer() = default;
  Standardizer(Eigen::VectorXd means, Eigen::VectorXd stds, std::vector<std::string> columns = {})
      : means_(std::move(means)), stds_(std::move(stds)), columns_(std::move(columns)) {}

  /// Column means and sample (n - 1) standard deviations. Throws ConstantColumn
  /// when a column has zero spread.
  static Standardizer fit(const Eigen::MatrixXd& X, const std::vector<std::string>& names = {});

  Eigen::MatrixXd transform(const Eigen::MatrixXd& X) const;
  Eigen::MatrixXd inverse_transform(const Eigen::MatrixXd& Z) const;

  const Eigen::VectorXd& means() const { return means_; }
  const Eigen::VectorXd& stds() const { return stds_; }
  const std::vector<std::string>& columns() const { return columns_; }

 private:
  Eigen::VectorXd means_;
  Eigen::VectorXd stds_;
  std::vector<std::string> columns_;
};

Standardizer fit_standardizer(const Dataset& train, const std::vector<std::string>& columns);
/// Transforms the standardizer's columns in place; other columns pass through.
Dataset apply_standardizer(const Standardizer& s, const Dataset& data);

// ---- Splits ----------------------------------------------------------------

struct HoldoutSplit {
  Dataset train;
  Dataset test;
  std::vector<Eigen::Index> train_rows;
  std::vector<Eigen::Index> test_rows;
};

/// round(fraction * rows) test rows, drawn only from `stratify_block` when given.
HoldoutSplit holdout_split(const Dataset& data, double fraction, std::uint64_t seed,
                           const std::optional<std::string>& stratify_block = std::nullopt);

/// k disjoint validation folds covering 0..n-1, sizes differing by at most one.
/// Each fold is sorted.
std::vector<std::vector<Eigen::Index>> kfold_indices(Eigen::Index n, int k, std::uint64_t seed);

// ---- Synthetic data --------------------------------------------------------

struct SynthOptions {
  /// Each non-degenerate range [lo, hi] becomes [lo / s, hi * s].
  double range_scale = 1.0;
  std::string provenance = "synthetic";
  /// Defaults to select_base_subset(schema, schema.preferred_base()).
  std::optional<std::vector<std::string>> base_subset;
};

/// Independents drawn log-uniformly in their declared ranges; the dependent is
/// law(Pi groups) * exp(eps), eps ~ N(0, noise_sigma^2), mapped back through the
/// target group. `law` has one exponent per Pi group, in group order.
Dataset synth_generate(const DatasetSchema& schema, Eigen::Index n, const MonomialModel& law, double noise_sigma,
                       std::uint64_t seed, const SynthOptions& options = {});

/// Ranges widened as in SynthOptions::range_scale; degenerate ranges are kept.
DatasetSchema widen_ranges(const DatasetSchema& schema, double scale);

}  // namespace pireduce
