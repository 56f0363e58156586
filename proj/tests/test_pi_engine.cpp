#include <doctest.h>

#include "oracles.hpp"
#include "pireduce/errors.hpp"
#include "pireduce/pi_engine.hpp"
#include "pireduce/schema.hpp"

using namespace pireduce;

namespace {

const UnitRegistry& units() {
  static const UnitRegistry reg = UnitRegistry::builtin();
  return reg;
}

VariableSpec var(const std::string& name, const std::string& unit, Role role = Role::Independent) {
  return {name, units().find(unit), role, std::nullopt, ""};
}

Dataset table2_rows() {
  const DatasetSchema schema = builtin_biofilter_schema();
  Dataset d;
  d.schema = schema;
  d.values.resize(2, 9);
  // T, Pv, A, IC_org, B_t, P, C_fit, t_o, EC_org
  d.values.row(0) << 10, 0.1, 180, 10, 180, 1.058, 2.6, 37, 5;
  d.values.row(1) << 20, 0.1, 340, 21.7, 180, 1.058, 2.6, 37, 17.25;
  d.provenance = {"", ""};
  return d;
}

}  // namespace

TEST_CASE("base subset: reference choice and rejection") {
  const DatasetSchema schema = builtin_biofilter_schema();
  const std::vector<std::string> ref{"T", "IC_org", "A", "C_fit"};
  CHECK(select_base_subset(schema, ref) == ref);
  CHECK(select_base_subset(schema, schema.preferred_base()) == ref);
  try {
    select_base_subset(schema, std::vector<std::string>{"P", "C_fit", "Pv", "A"});
    FAIL("expected DegenerateDimensions");
  } catch (const DegenerateDimensions& e) {
    const std::string msg = e.what();
    CHECK(msg.find("rank 2") != std::string::npos);
    CHECK(msg.find("uncovered") != std::string::npos);
  }
  CHECK_THROWS_AS(select_base_subset(schema, std::vector<std::string>{"T", "T", "A", "C_fit"}), DegenerateDimensions);
  CHECK_THROWS_AS(select_base_subset(schema, std::vector<std::string>{"T", "EC_org", "A", "C_fit"}),
                  DegenerateDimensions);
}

TEST_CASE("base subset: automatic selection is deterministic and spanning") {
  const DatasetSchema schema = builtin_biofilter_schema();
  const auto auto_base = select_base_subset(schema);
  CHECK(auto_base == select_base_subset(schema));
  CHECK(auto_base.size() == 4);
  CHECK(rank_exact(dimension_matrix(schema, auto_base, schema.present_dimensions())) == 4);
  // Schema order T, Pv, A, IC_org: first spanning combination.
  CHECK(auto_base == std::vector<std::string>{"T", "Pv", "A", "IC_org"});
}

TEST_CASE("base subset: forced choice when only m variables exist") {
  const DatasetSchema schema({var("x", "m"), var("w", "kg"), var("t", "s"), var("y", "1", Role::Dependent)});
  CHECK(select_base_subset(schema) == std::vector<std::string>{"x", "w", "t"});
  const PiBasis basis = derive_pi_basis(schema, select_base_subset(schema));
  CHECK(basis.groups.empty());
  CHECK(basis.target_group.is_passthrough());
}

TEST_CASE("derive_pi_basis: reference groups") {
  const DatasetSchema schema = builtin_biofilter_schema();
  const PiBasis basis = derive_pi_basis(schema, {"T", "IC_org", "A", "C_fit"});
  REQUIRE(basis.groups.size() == 4);
  const std::vector<std::string> expected{"Pv/C_fit", "B_t/A", "P/C_fit", "t_o/T"};
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(basis.groups[i].formula() == expected[i]);
    CHECK(basis.groups[i].label == "Upi" + std::to_string(i + 1));
    for (const auto& [name, e] : basis.groups[i].base_exponents) CHECK((e == 0 || e == 1));
  }
  CHECK(basis.target_group.formula() == "EC_org/IC_org");
  CHECK(basis.target_group.label == "Ypi");

  std::vector<Rational> pv;
  for (const auto& [name, e] : basis.groups[0].base_exponents) pv.push_back(e);
  CHECK(pv == std::vector<Rational>{0, 0, 0, 1});

  // Pi count: n + 1 - m expressions.
  CHECK(basis.groups.size() + 1 == schema.independent_names().size() + 1 - 4);
}

TEST_CASE("derive_pi_basis: every group is exactly dimensionless") {
  const DatasetSchema schema = builtin_biofilter_schema();
  for (const auto& base : {std::vector<std::string>{"T", "IC_org", "A", "C_fit"}, select_base_subset(schema)}) {
    const PiBasis basis = derive_pi_basis(schema, base);
    auto check = [&](const PiGroup& g) {
      DimVector d = schema.column(g.numerator).unit.dims;
      for (const auto& [name, e] : g.base_exponents) d = dim_mul(d, dim_pow(schema.column(name).unit.dims, -e));
      CHECK(is_dimensionless(d));
    };
    for (const auto& g : basis.groups) check(g);
    check(basis.target_group);
  }
}

TEST_CASE("derive_pi_basis: fractional exponents") {
  // Velocity over sqrt(g * length)-like combination: v [L T^-1], base {len [L], acc [L T^-2]}.
  UnitRegistry reg = units();
  reg.add({"m/s", DimVector{{"L", Rational(1)}, {"T", Rational(-1)}}, 1.0});
  reg.add({"m/s^2", DimVector{{"L", Rational(1)}, {"T", Rational(-2)}}, 1.0});
  const DatasetSchema schema({{"len", reg.find("m"), Role::Independent, std::nullopt, ""},
                              {"acc", reg.find("m/s^2"), Role::Independent, std::nullopt, ""},
                              {"v", reg.find("m/s"), Role::Dependent, std::nullopt, ""}});
  const PiBasis basis = derive_pi_basis(schema, {"len", "acc"});
  CHECK(basis.target_group.formula() == "v/(len^(1/2)*acc^(1/2))");

  Dataset d;
  d.schema = schema;
  d.values.resize(1, 3);
  d.values << 2.0, 8.0, 12.0;
  d.provenance = {""};
  const Dataset pi = nondimensionalize(d, basis);
  CHECK(pi.values(0, 0) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(pi_basis_from_json(pi_basis_to_json(basis)).target_group.base_exponents == basis.target_group.base_exponents);
}

TEST_CASE("derive_pi_basis: dimensionless variable passes through") {
  const DatasetSchema schema({var("x", "m"), var("ratio", "1"), var("y", "mm", Role::Dependent)});
  const PiBasis basis = derive_pi_basis(schema, {"x"});
  REQUIRE(basis.groups.size() == 1);
  CHECK(basis.groups[0].is_passthrough());
  CHECK(basis.groups[0].formula() == "ratio");
  Dataset d;
  d.schema = schema;
  d.values.resize(2, 3);
  d.values << 2, 0.3, 5, 4, 0.7, 6;
  d.provenance = {"", ""};
  const Dataset pi = nondimensionalize(d, basis);
  CHECK(pi.values(0, 0) == 0.3);
  CHECK(pi.values(1, 0) == 0.7);
}

TEST_CASE("derive_pi_basis: errors") {
  const DatasetSchema schema = builtin_biofilter_schema();
  CHECK_THROWS_AS(derive_pi_basis(schema, {"T", "IC_org", "A"}), SingularSystem);
  CHECK_THROWS_AS(derive_pi_basis(schema, {"P", "C_fit", "Pv", "A"}), SingularSystem);
  CHECK_THROWS_AS(derive_pi_basis(schema, {"T", "EC_org", "A", "C_fit"}), SchemaError);
}

TEST_CASE("derive_pi_basis: deterministic") {
  const DatasetSchema schema = builtin_biofilter_schema();
  const auto a = pi_basis_to_json(derive_pi_basis(schema, {"T", "IC_org", "A", "C_fit"}));
  const auto b = pi_basis_to_json(derive_pi_basis(schema, {"T", "IC_org", "A", "C_fit"}));
  CHECK(a.dump() == b.dump());
}

TEST_CASE("nondimensionalize: hand-computed ratios") {
  const PiBasis basis = derive_pi_basis(builtin_biofilter_schema(), {"T", "IC_org", "A", "C_fit"});
  Dataset d = table2_rows();
  const Dataset pi = nondimensionalize(d, basis);
  CHECK(pi.rows() == 2);
  CHECK(pi.schema.names() == std::vector<std::string>{"Upi1", "Upi2", "Upi3", "Upi4", "Ypi"});
  for (const auto& c : pi.schema.columns()) CHECK(is_dimensionless(c.unit.dims));
  CHECK(pi.schema.dependent().name == "Ypi");
  CHECK(pi.values(0, 0) == doctest::Approx(1.0e-7 / 2.6e-3).epsilon(1e-12));
  CHECK(pi.values(0, 0) == doctest::Approx(3.846e-5).epsilon(1e-3));
  CHECK(pi.values(0, 1) == doctest::Approx(180.0 / (180.0 * 86400.0)).epsilon(1e-12));
  CHECK(pi.values(0, 1) == doctest::Approx(1.157e-5).epsilon(1e-3));
  CHECK(pi.values(0, 4) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("nondimensionalize: zero base value names row and variable") {
  const PiBasis basis = derive_pi_basis(builtin_biofilter_schema(), {"T", "IC_org", "A", "C_fit"});
  Dataset d = table2_rows();
  d.values(1, 2) = 0.0;  // A
  try {
    nondimensionalize(d, basis);
    FAIL("expected DivisionByZero");
  } catch (const DivisionByZero& e) {
    const std::string msg = e.what();
    CHECK(msg.find("row 2") != std::string::npos);
    CHECK(msg.find("'A'") != std::string::npos);
  }
}

TEST_CASE("dimensionalize_target") {
  const PiBasis basis = derive_pi_basis(builtin_biofilter_schema(), {"T", "IC_org", "A", "C_fit"});
  Dataset d = table2_rows();
  Eigen::VectorXd y(2);
  y << 0.5, 1.0;
  const Eigen::VectorXd ec = dimensionalize_target(y, d, basis);
  CHECK(ec(0) == doctest::Approx(5.0).epsilon(1e-14));
  CHECK(ec(1) == doctest::Approx(21.7).epsilon(1e-14));

  const Dataset pi = nondimensionalize(d, basis);
  const Eigen::VectorXd back = dimensionalize_target(pi.values.col(4), d, basis);
  CHECK((back - d.column("EC_org")).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("property: Pi values are invariant under unit rescaling") {
  // Re-express C_fit and P in µm instead of mm, IC_org/EC_org in g/L.
  const DatasetSchema schema = builtin_biofilter_schema();
  std::vector<VariableSpec> cols = schema.columns();
  for (auto& c : cols) {
    if (c.name == "C_fit" || c.name == "P") c.unit = units().find("µm");
    if (c.name == "IC_org" || c.name == "EC_org") c.unit = units().find("g/L");
  }
  const DatasetSchema rescaled(cols, schema.base_dimensions(), schema.preferred_base());
  const std::vector<std::string> base{"T", "IC_org", "A", "C_fit"};
  const PiBasis b1 = derive_pi_basis(schema, base);
  const PiBasis b2 = derive_pi_basis(rescaled, base);

  Rng rng = make_rng(31, 0);
  std::uniform_real_distribution<double> u(0.5, 2.0);
  Dataset d1 = table2_rows();
  for (int trial = 0; trial < 50; ++trial) {
    for (Eigen::Index i = 0; i < d1.values.size(); ++i) d1.values.data()[i] = u(rng) * (1 + trial);
    Dataset d2 = d1;
    d2.schema = rescaled;
    for (const char* name : {"C_fit", "P"}) d2.values.col(schema.index_of(name)) *= 1000.0;
    for (const char* name : {"IC_org", "EC_org"}) d2.values.col(schema.index_of(name)) /= 1000.0;
    const Eigen::MatrixXd p1 = nondimensionalize(d1, b1).values;
    const Eigen::MatrixXd p2 = nondimensionalize(d2, b2).values;
    CHECK(((p1 - p2).array().abs() / p1.array().abs()).maxCoeff() < 1e-12);
  }
}

TEST_CASE("pi basis JSON round trip") {
  const PiBasis basis = derive_pi_basis(builtin_biofilter_schema(), {"T", "IC_org", "A", "C_fit"});
  const nlohmann::json doc = pi_basis_to_json(basis);
  CHECK(doc["groups"][0]["formula"] == "Pv/C_fit");
  CHECK(doc["groups"][0]["exponents"]["C_fit"] == "1");
  const PiBasis back = pi_basis_from_json(doc);
  CHECK(pi_basis_to_json(back).dump() == doc.dump());
}
