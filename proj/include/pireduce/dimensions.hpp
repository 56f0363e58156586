#pragma once

#include <initializer_list>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "pireduce/rational.hpp"

namespace pireduce {

/// Base dimension labels used when a schema does not declare its own.
inline const std::vector<std::string>& default_base_dimensions() {
  static const std::vector<std::string> dims{"L", "M", "T", "K"};
  return dims;
}

/// Exponents of a physical quantity over base dimensions.
///
/// Stored sparsely: a label absent from the map has exponent zero, and zero
/// exponents are never stored, so structural equality is value equality and
/// the empty vector is the dimensionless quantity.
class DimVector {
 public:
  DimVector() = default;
  DimVector(std::initializer_list<std::pair<const std::string, Rational>> init);

  static DimVector base(const std::string& label, Rational power = Rational(1));

  Rational operator[](const std::string& label) const;
  void set(const std::string& label, const Rational& power);

  const std::map<std::string, Rational>& exponents() const { return exponents_; }
  bool empty() const { return exponents_.empty(); }

  friend bool operator==(const DimVector& a, const DimVector& b) {
    return a.exponents_ == b.exponents_;
  }

  /// e.g. "L^-3.M" or "1" for dimensionless.
  std::string to_string() const;

 private:
  std::map<std::string, Rational> exponents_;
};

DimVector dim_mul(const DimVector& a, const DimVector& b);
DimVector dim_pow(const DimVector& a, const Rational& r);
bool is_dimensionless(const DimVector& a);

inline DimVector operator*(const DimVector& a, const DimVector& b) { return dim_mul(a, b); }

struct UnitDef {
  std::string symbol;
  DimVector dims;
  double to_base_factor = 1.0;  // value_in_SI = value * to_base_factor
};

/// Symbol -> UnitDef lookup. builtin() covers SI bases and the symbols of the
/// biofilter tables (k, µm, mm, days, Sec, mg/L).
class UnitRegistry {
 public:
  static UnitRegistry builtin();

  /// Throws SchemaError for a non-positive or non-finite factor.
  void add(UnitDef unit);
  bool contains(const std::string& symbol) const;
  /// Throws SchemaError for an unknown symbol.
  const UnitDef& find(const std::string& symbol) const;

  std::vector<std::string> symbols() const;

 private:
  std::map<std::string, UnitDef> units_;
};

double to_base_value(double x, const UnitDef& unit);
double to_base_value(double x, const std::string& symbol, const UnitRegistry& registry);

}  // namespace pireduce
