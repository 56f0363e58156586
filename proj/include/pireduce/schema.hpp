#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "pireduce/dimensions.hpp"

namespace pireduce {

enum class Role { Independent, Dependent, Constant };

std::string to_string(Role role);
Role parse_role(const std::string& text);

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

struct VariableSpec {
  std::string name;
  UnitDef unit;
  Role role = Role::Independent;
  std::optional<Range> declared_range;
  std::string description;
};

/// Ordered, unit-annotated column definitions with exactly one dependent column.
class DatasetSchema {
 public:
  DatasetSchema() = default;
  /// Throws SchemaError if names repeat, the dependent is missing or not unique,
  /// a range is inverted, or a unit uses a label outside `base_dimensions`.
  DatasetSchema(std::vector<VariableSpec> columns, std::vector<std::string> base_dimensions = default_base_dimensions(),
                std::optional<std::vector<std::string>> preferred_base = std::nullopt);

  const std::vector<VariableSpec>& columns() const { return columns_; }
  const std::vector<std::string>& base_dimensions() const { return base_dimensions_; }
  const std::optional<std::vector<std::string>>& preferred_base() const { return preferred_base_; }

  std::size_t size() const { return columns_.size(); }
  Eigen::Index index_of(const std::string& name) const;
  bool contains(const std::string& name) const;
  const VariableSpec& column(const std::string& name) const;
  const VariableSpec& dependent() const;

  /// Independent and constant columns, in schema order. Constants take part in
  /// dimensional analysis like any other independent variable.
  std::vector<std::string> independent_names() const;
  std::vector<std::string> names() const;

  /// Base dimensions with a nonzero exponent in at least one column, in
  /// base_dimensions() order.
  std::vector<std::string> present_dimensions() const;

 private:
  std::vector<VariableSpec> columns_;
  std::vector<std::string> base_dimensions_ = default_base_dimensions();
  std::optional<std::vector<std::string>> preferred_base_;
};

/// Rows of finite values, one column per schema column, plus a provenance tag per row.
struct Dataset {
  DatasetSchema schema;
  Eigen::MatrixXd values;
  std::vector<std::string> provenance;

  Eigen::Index rows() const { return values.rows(); }
  Eigen::VectorXd column(const std::string& name) const;
  Dataset subset(const std::vector<Eigen::Index>& row_indices) const;
  /// Throws IngestError on shape mismatch or non-finite values.
  void check() const;
};

// Schema documents. `units` entries extend the builtin registry.
DatasetSchema schema_from_json(const nlohmann::json& doc);
nlohmann::json schema_to_json(const DatasetSchema& schema);
DatasetSchema load_schema(const std::filesystem::path& path);

/// Training-data layout of the biofilter study: eight independents, EC_org dependent,
/// base subset {T, IC_org, A, C_fit}.
DatasetSchema builtin_biofilter_schema();
/// Same columns with the ranges of the held-out full-scale filter.
DatasetSchema builtin_biofilter_test_schema();

}  // namespace pireduce
