#include "pireduce/pi_engine.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "pireduce/errors.hpp"

namespace pireduce {

using Eigen::Index;
using nlohmann::json;

namespace {

std::string power_suffix(const Rational& e) {
  if (e == 1) return "";
  const std::string p = format_rational(e);
  return p.find('/') == std::string::npos ? "^" + p : "^(" + p + ")";
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::string join_set(const std::vector<std::string>& parts) { return "{" + join(parts, ", ") + "}"; }

// Advances `idx` to the next k-combination of 0..n-1 in lexicographic order.
bool next_combination(std::vector<std::size_t>& idx, std::size_t n) {
  const std::size_t k = idx.size();
  for (std::size_t i = k; i-- > 0;) {
    if (idx[i] < n - k + i) {
      ++idx[i];
      for (std::size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
      return true;
    }
  }
  return false;
}

PiGroup solve_group(const DatasetSchema& schema, const std::string& variable, const std::string& label,
                    const std::vector<std::string>& base, const std::vector<std::string>& dims,
                    const RationalMatrix& D) {
  const DimVector& target = schema.column(variable).unit.dims;
  RationalVector rhs(static_cast<Index>(dims.size()));
  for (std::size_t r = 0; r < dims.size(); ++r) rhs(static_cast<Index>(r)) = target[dims[r]];

  const RationalVector x = dims.empty() ? RationalVector() : solve_exact(D, rhs);

  PiGroup g;
  g.label = label;
  g.numerator = variable;
  DimVector residual = target;
  for (std::size_t j = 0; j < base.size(); ++j) {
    const Rational& e = x(static_cast<Index>(j));
    g.base_exponents.emplace_back(base[j], e);
    residual = dim_mul(residual, dim_pow(schema.column(base[j]).unit.dims, -e));
  }
  if (!is_dimensionless(residual)) {
    throw DegenerateDimensions("group for '" + variable + "' is not dimensionless (" + residual.to_string() +
                               "); its dimensions lie outside the span of the base subset");
  }
  return g;
}

Rational exponent_of(const PiGroup& g, std::size_t j) { return g.base_exponents[j].second; }

// value_SI / prod(base_SI ^ e) for one row, or the raw value for a pass-through group.
double evaluate_group(const PiGroup& g, const Dataset& data, Index row, const std::vector<Index>& base_cols,
                      Index num_col) {
  const auto& cols = data.schema.columns();
  if (g.is_passthrough()) return data.values(row, num_col);
  double value = to_base_value(data.values(row, num_col), cols[static_cast<std::size_t>(num_col)].unit);
  for (std::size_t j = 0; j < base_cols.size(); ++j) {
    const Rational e = exponent_of(g, j);
    if (e == 0) continue;
    const Index c = base_cols[j];
    const auto& spec = cols[static_cast<std::size_t>(c)];
    const double b = to_base_value(data.values(row, c), spec.unit);
    if (b == 0.0) {
      throw DivisionByZero("row " + std::to_string(row + 1) + ": base variable '" + spec.name +
                           "' is zero while forming " + g.label);
    }
    if (b < 0.0 && boost::multiprecision::denominator(e) != 1) {
      throw NumericError("row " + std::to_string(row + 1) + ": negative '" + spec.name +
                         "' raised to fractional power in " + g.label);
    }
    value /= (e == 1) ? b : std::pow(b, to_double(e));
  }
  return value;
}

std::vector<Index> base_columns(const DatasetSchema& schema, const PiBasis& basis) {
  std::vector<Index> out;
  for (const auto& b : basis.base_subset) out.push_back(schema.index_of(b));
  return out;
}

json group_to_json(const PiGroup& g) {
  json exps = json::object();
  for (const auto& [name, e] : g.base_exponents) exps[name] = format_rational(e);
  return {{"label", g.label}, {"numerator", g.numerator}, {"exponents", exps}, {"formula", g.formula()}};
}

PiGroup group_from_json(const json& j, const std::vector<std::string>& base) {
  PiGroup g;
  g.label = j.at("label").get<std::string>();
  g.numerator = j.at("numerator").get<std::string>();
  const auto& exps = j.at("exponents");
  for (const auto& b : base) {
    g.base_exponents.emplace_back(b, exps.contains(b) ? parse_rational(exps.at(b).get<std::string>()) : Rational(0));
  }
  return g;
}

}  // namespace

std::string PiGroup::formula() const {
  std::vector<std::string> num{numerator};
  std::vector<std::string> den;
  for (const auto& [name, e] : base_exponents) {
    if (e > 0) den.push_back(name + power_suffix(e));
    if (e < 0) num.push_back(name + power_suffix(-e));
  }
  std::string out = join(num, "*");
  if (den.size() == 1) out += "/" + den.front();
  if (den.size() > 1) out += "/(" + join(den, "*") + ")";
  return out;
}

bool PiGroup::is_passthrough() const {
  return std::all_of(base_exponents.begin(), base_exponents.end(), [](const auto& p) { return p.second == 0; });
}

std::vector<std::string> PiBasis::group_labels() const {
  std::vector<std::string> out;
  for (const auto& g : groups) out.push_back(g.label);
  return out;
}

RationalMatrix dimension_matrix(const DatasetSchema& schema, const std::vector<std::string>& variables,
                                const std::vector<std::string>& dimensions) {
  RationalMatrix D(static_cast<Index>(dimensions.size()), static_cast<Index>(variables.size()));
  for (std::size_t j = 0; j < variables.size(); ++j) {
    const DimVector& d = schema.column(variables[j]).unit.dims;
    for (std::size_t i = 0; i < dimensions.size(); ++i) {
      D(static_cast<Index>(i), static_cast<Index>(j)) = d[dimensions[i]];
    }
  }
  return D;
}

std::vector<std::string> select_base_subset(const DatasetSchema& schema,
                                            const std::optional<std::vector<std::string>>& preferred) {
  const std::vector<std::string> dims = schema.present_dimensions();
  const std::size_t m = dims.size();
  const std::vector<std::string> candidates = schema.independent_names();

  if (preferred) {
    const auto& p = *preferred;
    if (std::set<std::string>(p.begin(), p.end()).size() != p.size()) {
      throw DegenerateDimensions("preferred base subset " + join_set(p) + " repeats a variable");
    }
    for (const auto& name : p) {
      if (std::find(candidates.begin(), candidates.end(), name) == candidates.end()) {
        throw DegenerateDimensions("preferred base variable '" + name + "' is not an independent column");
      }
    }
    std::vector<std::string> covered;
    std::vector<std::string> missing;
    for (const auto& d : dims) {
      const bool hit = std::any_of(p.begin(), p.end(), [&](const auto& v) { return schema.column(v).unit.dims[d] != 0; });
      (hit ? covered : missing).push_back(d);
    }
    const Index rank = rank_exact(dimension_matrix(schema, p, dims));
    if (p.size() != m || rank != static_cast<Index>(m)) {
      throw DegenerateDimensions("base subset " + join_set(p) + " has " + std::to_string(p.size()) +
                                 " variables and dimension rank " + std::to_string(rank) + "; need " +
                                 std::to_string(m) + " spanning " + join_set(dims) + ". Covered dimensions: " +
                                 join_set(covered) + ", uncovered: " + join_set(missing));
    }
    return p;
  }

  if (m == 0) return {};
  if (candidates.size() < m) {
    throw DegenerateDimensions("schema has " + std::to_string(candidates.size()) + " independent variables but " +
                               std::to_string(m) + " dimensions " + join_set(dims));
  }
  std::vector<std::size_t> idx(m);
  for (std::size_t i = 0; i < m; ++i) idx[i] = i;
  do {
    std::vector<std::string> subset;
    for (auto i : idx) subset.push_back(candidates[i]);
    if (rank_exact(dimension_matrix(schema, subset, dims)) == static_cast<Index>(m)) return subset;
  } while (next_combination(idx, candidates.size()));

  const Index best = rank_exact(dimension_matrix(schema, candidates, dims));
  throw DegenerateDimensions("no subset of the independent variables spans " + join_set(dims) +
                             " (their dimension rank is " + std::to_string(best) + ")");
}

PiBasis derive_pi_basis(const DatasetSchema& schema, const std::vector<std::string>& base_subset) {
  PiBasis basis;
  basis.dimensions = schema.present_dimensions();
  basis.base_subset = base_subset;
  if (base_subset.size() != basis.dimensions.size()) {
    throw SingularSystem("base subset " + join_set(base_subset) + " must have exactly " +
                         std::to_string(basis.dimensions.size()) + " variables");
  }
  const std::string dependent = schema.dependent().name;
  for (const auto& b : base_subset) {
    if (b == dependent) throw SchemaError("the dependent variable cannot be in the base subset");
    schema.index_of(b);
  }

  const RationalMatrix D = dimension_matrix(schema, base_subset, basis.dimensions);
  int next = 1;
  for (const auto& name : schema.independent_names()) {
    if (std::find(base_subset.begin(), base_subset.end(), name) != base_subset.end()) continue;
    basis.groups.push_back(
        solve_group(schema, name, "Upi" + std::to_string(next++), base_subset, basis.dimensions, D));
  }
  basis.target_group = solve_group(schema, dependent, "Ypi", base_subset, basis.dimensions, D);
  return basis;
}

Dataset nondimensionalize(const Dataset& data, const PiBasis& basis) {
  data.check();
  const DatasetSchema& schema = data.schema;
  const std::vector<Index> base_cols = base_columns(schema, basis);

  std::vector<const PiGroup*> all;
  for (const auto& g : basis.groups) all.push_back(&g);
  all.push_back(&basis.target_group);

  std::vector<VariableSpec> specs;
  for (const PiGroup* g : all) {
    VariableSpec s;
    s.name = g->label;
    s.unit = UnitDef{"1", DimVector{}, 1.0};
    s.role = g == &basis.target_group ? Role::Dependent : Role::Independent;
    s.description = g->formula();
    specs.push_back(std::move(s));
  }

  Dataset out;
  out.schema = DatasetSchema(std::move(specs), schema.base_dimensions());
  out.values.resize(data.rows(), static_cast<Index>(all.size()));
  out.provenance = data.provenance;
  for (std::size_t k = 0; k < all.size(); ++k) {
    const Index num_col = schema.index_of(all[k]->numerator);
    for (Index r = 0; r < data.rows(); ++r) {
      out.values(r, static_cast<Index>(k)) = evaluate_group(*all[k], data, r, base_cols, num_col);
    }
  }
  return out;
}

Eigen::VectorXd dimensionalize_target(const Eigen::VectorXd& y_pi, const Dataset& rows, const PiBasis& basis) {
  if (y_pi.size() != rows.rows()) throw DimensionError("dimensionalize_target: length mismatch");
  const PiGroup& g = basis.target_group;
  if (g.is_passthrough()) return y_pi;

  const DatasetSchema& schema = rows.schema;
  const std::vector<Index> base_cols = base_columns(schema, basis);
  const double out_factor = schema.column(g.numerator).unit.to_base_factor;
  Eigen::VectorXd out(y_pi.size());
  for (Index r = 0; r < y_pi.size(); ++r) {
    double value = y_pi(r);
    for (std::size_t j = 0; j < base_cols.size(); ++j) {
      const Rational e = exponent_of(g, j);
      if (e == 0) continue;
      const auto& spec = schema.columns()[static_cast<std::size_t>(base_cols[j])];
      const double b = to_base_value(rows.values(r, base_cols[j]), spec.unit);
      if (b == 0.0) {
        throw DivisionByZero("row " + std::to_string(r + 1) + ": base variable '" + spec.name + "' is zero");
      }
      value *= (e == 1) ? b : std::pow(b, to_double(e));
    }
    out(r) = value / out_factor;
  }
  return out;
}

json pi_basis_to_json(const PiBasis& basis) {
  json groups = json::array();
  for (const auto& g : basis.groups) groups.push_back(group_to_json(g));
  return {{"format", "pireduce-pi-basis"},
          {"version", 1},
          {"dimensions", basis.dimensions},
          {"base_subset", basis.base_subset},
          {"groups", groups},
          {"target", group_to_json(basis.target_group)}};
}

PiBasis pi_basis_from_json(const json& doc) {
  try {
    if (doc.value("format", std::string{}) != "pireduce-pi-basis") throw SchemaError("not a Pi basis document");
    PiBasis b;
    b.dimensions = doc.at("dimensions").get<std::vector<std::string>>();
    b.base_subset = doc.at("base_subset").get<std::vector<std::string>>();
    for (const auto& g : doc.at("groups")) b.groups.push_back(group_from_json(g, b.base_subset));
    b.target_group = group_from_json(doc.at("target"), b.base_subset);
    return b;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed Pi basis document: ") + e.what());
  }
}

}  // namespace pireduce
