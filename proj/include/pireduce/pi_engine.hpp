#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "pireduce/dimensions.hpp"
#include "pireduce/numerics.hpp"
#include "pireduce/schema.hpp"

namespace pireduce {

/// numerator / prod(base_v ^ exponent_v), dimensionless by construction.
struct PiGroup {
  std::string label;
  std::string numerator;
  std::vector<std::pair<std::string, Rational>> base_exponents;  // base-subset order

  /// e.g. "Pv/C_fit", "B_t*T^(1/2)/(A*C_fit^2)"; the bare numerator when all exponents vanish.
  std::string formula() const;
  bool is_passthrough() const;
};

struct PiBasis {
  std::vector<std::string> dimensions;   // base dimensions spanned, row order of the system
  std::vector<std::string> base_subset;  // one variable per dimension
  std::vector<PiGroup> groups;           // one per non-base independent variable
  PiGroup target_group;                  // the dependent variable

  std::vector<std::string> group_labels() const;
};

/// Dimension matrix: rows = `dimensions`, columns = `variables`.
RationalMatrix dimension_matrix(const DatasetSchema& schema, const std::vector<std::string>& variables,
                                const std::vector<std::string>& dimensions);

/// A preferred subset is returned unchanged when it has full rank; otherwise
/// DegenerateDimensions. Without one, the first full-rank combination of the
/// independent variables (schema order, lexicographic) is returned.
std::vector<std::string> select_base_subset(
    const DatasetSchema& schema,
    const std::optional<std::vector<std::string>>& preferred = std::nullopt);

PiBasis derive_pi_basis(const DatasetSchema& schema, const std::vector<std::string>& base_subset);

/// One dimensionless column per group (labels Upi1.., then Ypi), evaluated on
/// SI base-unit values.
Dataset nondimensionalize(const Dataset& data, const PiBasis& basis);

/// Inverts the target group row by row; result is in the dependent column's unit.
Eigen::VectorXd dimensionalize_target(const Eigen::VectorXd& y_pi, const Dataset& rows,
                                      const PiBasis& basis);

nlohmann::json pi_basis_to_json(const PiBasis& basis);
PiBasis pi_basis_from_json(const nlohmann::json& doc);

}  // namespace pireduce
