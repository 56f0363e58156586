#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "pireduce/errors.hpp"
#include "pireduce/log.hpp"
#include "pireduce/schema.hpp"

namespace pireduce {

using nlohmann::json;

std::string to_string(Role role) {
  switch (role) {
    case Role::Independent: return "independent";
    case Role::Dependent: return "dependent";
    case Role::Constant: return "constant";
  }
  return "independent";
}

Role parse_role(const std::string& text) {
  if (text == "independent") return Role::Independent;
  if (text == "dependent") return Role::Dependent;
  if (text == "constant") return Role::Constant;
  throw SchemaError("unknown role '" + text + "'");
}

DatasetSchema::DatasetSchema(std::vector<VariableSpec> columns, std::vector<std::string> base_dimensions,
                             std::optional<std::vector<std::string>> preferred_base)
    : columns_(std::move(columns)),
      base_dimensions_(std::move(base_dimensions)),
      preferred_base_(std::move(preferred_base)) {
  std::set<std::string> seen;
  int dependents = 0;
  const std::set<std::string> dims(base_dimensions_.begin(), base_dimensions_.end());
  if (dims.size() != base_dimensions_.size()) throw SchemaError("repeated base dimension label");
  for (const auto& c : columns_) {
    if (c.name.empty()) throw SchemaError("column with empty name");
    if (!seen.insert(c.name).second) throw SchemaError("duplicate column '" + c.name + "'");
    if (c.role == Role::Dependent) ++dependents;
    if (c.declared_range && !(c.declared_range->lo <= c.declared_range->hi)) {
      throw SchemaError("column '" + c.name + "' has an inverted or NaN range");
    }
    for (const auto& [label, _] : c.unit.dims.exponents()) {
      if (!dims.count(label)) {
        throw SchemaError("column '" + c.name + "' uses dimension '" + label +
                          "' which is not a declared base dimension");
      }
    }
  }
  if (dependents != 1) {
    throw SchemaError("schema needs exactly one dependent column, found " + std::to_string(dependents));
  }
  if (preferred_base_) {
    for (const auto& name : *preferred_base_) {
      if (!seen.count(name)) throw SchemaError("preferred base variable '" + name + "' is not a column");
    }
  }
}

Eigen::Index DatasetSchema::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i].name == name) return static_cast<Eigen::Index>(i);
  }
  throw SchemaError("no column named '" + name + "'");
}

bool DatasetSchema::contains(const std::string& name) const {
  return std::any_of(columns_.begin(), columns_.end(), [&](const auto& c) { return c.name == name; });
}

const VariableSpec& DatasetSchema::column(const std::string& name) const {
  return columns_[static_cast<std::size_t>(index_of(name))];
}

const VariableSpec& DatasetSchema::dependent() const {
  for (const auto& c : columns_) {
    if (c.role == Role::Dependent) return c;
  }
  throw SchemaError("schema has no dependent column");
}

std::vector<std::string> DatasetSchema::independent_names() const {
  std::vector<std::string> out;
  for (const auto& c : columns_) {
    if (c.role != Role::Dependent) out.push_back(c.name);
  }
  return out;
}

std::vector<std::string> DatasetSchema::names() const {
  std::vector<std::string> out;
  for (const auto& c : columns_) out.push_back(c.name);
  return out;
}

std::vector<std::string> DatasetSchema::present_dimensions() const {
  std::vector<std::string> out;
  for (const auto& d : base_dimensions_) {
    const bool used = std::any_of(columns_.begin(), columns_.end(),
                                  [&](const auto& c) { return c.unit.dims[d] != 0; });
    if (used) out.push_back(d);
  }
  return out;
}

namespace {

DimVector dims_from_json(const json& j) {
  DimVector v;
  for (const auto& [label, value] : j.items()) {
    v.set(label, value.is_string() ? parse_rational(value.get<std::string>())
                                   : Rational(value.get<long long>()));
  }
  return v;
}

json dims_to_json(const DimVector& v, const std::vector<std::string>& labels) {
  json j = json::object();
  for (const auto& l : labels) j[l] = format_rational(v[l]);
  return j;
}

}  // namespace

DatasetSchema schema_from_json(const json& doc) {
  try {
    std::vector<std::string> base_dims = default_base_dimensions();
    if (doc.contains("base_dimensions")) base_dims = doc.at("base_dimensions").get<std::vector<std::string>>();

    UnitRegistry registry = UnitRegistry::builtin();
    if (doc.contains("units")) {
      for (const auto& u : doc.at("units")) {
        registry.add({u.at("symbol").get<std::string>(), dims_from_json(u.at("dims")),
                      u.at("to_base_factor").get<double>()});
      }
    }

    const std::string dependent = doc.value("dependent", std::string{});
    std::vector<VariableSpec> columns;
    for (const auto& c : doc.at("columns")) {
      VariableSpec spec;
      spec.name = c.at("name").get<std::string>();
      spec.unit = registry.find(c.at("unit").get<std::string>());
      spec.description = c.value("description", std::string{});
      spec.role = c.contains("role") ? parse_role(c.at("role").get<std::string>()) : Role::Independent;
      if (!dependent.empty()) {
        if (spec.name == dependent) {
          spec.role = Role::Dependent;
        } else if (spec.role == Role::Dependent) {
          throw SchemaError("column '" + spec.name + "' marked dependent but schema names '" + dependent + "'");
        }
      }
      if (c.contains("range") && !c.at("range").is_null()) {
        const auto& r = c.at("range");
        Range range;
        if (r.is_number()) {
          range = {r.get<double>(), r.get<double>()};
        } else {
          range = {r.at(0).get<double>(), r.at(1).get<double>()};
        }
        if (range.lo > range.hi) {
          log::warn("column '" + spec.name + "': range given high-to-low, reading it as [lo, hi]");
          std::swap(range.lo, range.hi);
        }
        spec.declared_range = range;
      }
      if (c.contains("dims")) {
        const DimVector declared = dims_from_json(c.at("dims"));
        if (!(declared == spec.unit.dims)) {
          throw SchemaError("column '" + spec.name + "': declared dims " + declared.to_string() +
                            " disagree with unit '" + spec.unit.symbol + "' (" + spec.unit.dims.to_string() + ")");
        }
      }
      columns.push_back(std::move(spec));
    }

    std::optional<std::vector<std::string>> preferred;
    if (doc.contains("preferred_base") && !doc.at("preferred_base").is_null()) {
      preferred = doc.at("preferred_base").get<std::vector<std::string>>();
    }
    return DatasetSchema(std::move(columns), std::move(base_dims), std::move(preferred));
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed schema document: ") + e.what());
  }
}

json schema_to_json(const DatasetSchema& schema) {
  json doc;
  doc["base_dimensions"] = schema.base_dimensions();
  doc["dependent"] = schema.dependent().name;
  if (schema.preferred_base()) doc["preferred_base"] = *schema.preferred_base();

  const UnitRegistry builtin = UnitRegistry::builtin();
  json units = json::array();
  json columns = json::array();
  for (const auto& c : schema.columns()) {
    const bool known = builtin.contains(c.unit.symbol) &&
                       builtin.find(c.unit.symbol).dims == c.unit.dims &&
                       builtin.find(c.unit.symbol).to_base_factor == c.unit.to_base_factor;
    if (!known) {
      units.push_back({{"symbol", c.unit.symbol},
                       {"dims", dims_to_json(c.unit.dims, schema.base_dimensions())},
                       {"to_base_factor", c.unit.to_base_factor}});
    }
    json col{{"name", c.name}, {"unit", c.unit.symbol}, {"role", to_string(c.role)},
             {"dims", dims_to_json(c.unit.dims, schema.base_dimensions())}};
    if (c.declared_range) col["range"] = {c.declared_range->lo, c.declared_range->hi};
    if (!c.description.empty()) col["description"] = c.description;
    columns.push_back(std::move(col));
  }
  if (!units.empty()) doc["units"] = std::move(units);
  doc["columns"] = std::move(columns);
  return doc;
}

DatasetSchema load_schema(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open schema file " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw SchemaError("schema file " + path.string() + " is not valid JSON: " + e.what());
  }
  return schema_from_json(doc);
}

namespace {

struct Row {
  const char* name;
  const char* unit;
  double lo;
  double hi;
  const char* description;
};

DatasetSchema biofilter_schema(const std::vector<Row>& rows) {
  const UnitRegistry units = UnitRegistry::builtin();
  std::vector<VariableSpec> cols;
  for (const auto& r : rows) {
    VariableSpec s;
    s.name = r.name;
    s.unit = units.find(r.unit);
    s.role = s.name == "EC_org" ? Role::Dependent : Role::Independent;
    s.declared_range = Range{r.lo, r.hi};
    s.description = r.description;
    cols.push_back(std::move(s));
  }
  return DatasetSchema(std::move(cols), default_base_dimensions(),
                       std::vector<std::string>{"T", "IC_org", "A", "C_fit"});
}

}  // namespace

DatasetSchema builtin_biofilter_schema() {
  return biofilter_schema({
      {"T", "k", 4, 28, "water temperature at the sample location"},
      {"Pv", "µm", 0.1, 0.2, "pore value"},
      {"A", "days", 7, 539, "filter age"},
      {"IC_org", "mg/L", 3.824, 17, "influent organic carbon"},
      {"B_t", "Sec", 8.4, 450, "empty bed contact time"},
      {"P", "mm", 0.9, 1.058, "GAC particle diameter"},
      {"C_fit", "mm", 2.6, 3.75, "filter diameter"},
      {"t_o", "k", 37, 37, "ambient temperature"},
      {"EC_org", "mg/L", 0.4, 12.729, "effluent organic carbon"},
  });
}

DatasetSchema builtin_biofilter_test_schema() {
  return biofilter_schema({
      {"T", "k", 10, 20, "water temperature at the sample location"},
      {"Pv", "μm", 0.1, 0.1, "pore value"},
      {"A", "days", 70, 340, "filter age"},
      {"IC_org", "mg/L", 7.725, 21.7, "influent organic carbon"},
      {"B_t", "Sec", 180, 180, "empty bed contact time"},
      {"P", "mm", 1.058, 1.058, "GAC particle diameter"},
      {"C_fit", "mm", 2.6, 2.6, "filter diameter"},
      {"t_o", "k", 37, 37, "ambient temperature"},
      {"EC_org", "mg/L", 5.291, 17.25, "effluent organic carbon"},
  });
}

}  // namespace pireduce
