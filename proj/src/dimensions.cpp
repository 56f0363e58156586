#include "pireduce/dimensions.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>

#include "pireduce/errors.hpp"

namespace pireduce {

Rational parse_rational(const std::string& text) {
  const auto slash = text.find('/');
  auto parse_int = [&](const std::string& s) {
    std::size_t start = (!s.empty() && (s[0] == '-' || s[0] == '+')) ? 1 : 0;
    if (s.size() == start) throw SchemaError("malformed rational '" + text + "'");
    for (std::size_t i = start; i < s.size(); ++i) {
      if (s[i] < '0' || s[i] > '9') throw SchemaError("malformed rational '" + text + "'");
    }
    return BigInt(s[0] == '+' ? s.substr(1) : s);
  };
  if (slash == std::string::npos) return Rational(parse_int(text));
  const BigInt num = parse_int(text.substr(0, slash));
  const BigInt den = parse_int(text.substr(slash + 1));
  if (den == 0) throw SchemaError("zero denominator in rational '" + text + "'");
  return Rational(num) / Rational(den);
}

std::string format_rational(const Rational& r) {
  const BigInt num = boost::multiprecision::numerator(r);
  const BigInt den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

DimVector::DimVector(std::initializer_list<std::pair<const std::string, Rational>> init) {
  for (const auto& [label, power] : init) set(label, (*this)[label] + power);
}

DimVector DimVector::base(const std::string& label, Rational power) {
  DimVector v;
  v.set(label, power);
  return v;
}

Rational DimVector::operator[](const std::string& label) const {
  const auto it = exponents_.find(label);
  return it == exponents_.end() ? Rational(0) : it->second;
}

void DimVector::set(const std::string& label, const Rational& power) {
  if (power == 0) {
    exponents_.erase(label);
  } else {
    exponents_[label] = power;
  }
}

std::string DimVector::to_string() const {
  if (exponents_.empty()) return "1";
  std::string out;
  for (const auto& [label, power] : exponents_) {
    if (!out.empty()) out += '.';
    out += label;
    if (power != 1) {
      const std::string p = format_rational(power);
      out += '^';
      out += p.find('/') == std::string::npos ? p : "(" + p + ")";
    }
  }
  return out;
}

DimVector dim_mul(const DimVector& a, const DimVector& b) {
  DimVector out = a;
  for (const auto& [label, power] : b.exponents()) out.set(label, out[label] + power);
  return out;
}

DimVector dim_pow(const DimVector& a, const Rational& r) {
  DimVector out;
  for (const auto& [label, power] : a.exponents()) out.set(label, power * r);
  return out;
}

bool is_dimensionless(const DimVector& a) { return a.empty(); }

UnitRegistry UnitRegistry::builtin() {
  const DimVector none;
  const DimVector length = DimVector::base("L");
  const DimVector mass = DimVector::base("M");
  const DimVector time = DimVector::base("T");
  const DimVector temperature = DimVector::base("K");
  const DimVector volume = DimVector::base("L", Rational(3));
  const DimVector density{{"L", Rational(-3)}, {"M", Rational(1)}};

  UnitRegistry r;
  r.add({"1", none, 1.0});
  r.add({"", none, 1.0});
  r.add({"m", length, 1.0});
  r.add({"cm", length, 1e-2});
  r.add({"mm", length, 1e-3});
  r.add({"µm", length, 1e-6});  // micro sign
  r.add({"μm", length, 1e-6});  // greek mu
  r.add({"um", length, 1e-6});
  r.add({"kg", mass, 1.0});
  r.add({"g", mass, 1e-3});
  r.add({"mg", mass, 1e-6});
  r.add({"s", time, 1.0});
  r.add({"Sec", time, 1.0});
  r.add({"sec", time, 1.0});
  r.add({"min", time, 60.0});
  r.add({"h", time, 3600.0});
  r.add({"H", time, 3600.0});
  r.add({"day", time, 86400.0});
  r.add({"days", time, 86400.0});
  r.add({"K", temperature, 1.0});
  r.add({"k", temperature, 1.0});
  r.add({"m^3", volume, 1.0});
  r.add({"L", volume, 1e-3});
  r.add({"kg/m^3", density, 1.0});
  r.add({"g/L", density, 1.0});
  r.add({"mg/L", density, 1e-3});
  return r;
}

void UnitRegistry::add(UnitDef unit) {
  if (!std::isfinite(unit.to_base_factor) || unit.to_base_factor <= 0.0) {
    throw SchemaError("unit '" + unit.symbol + "' needs a positive finite to_base_factor");
  }
  units_[unit.symbol] = std::move(unit);
}

bool UnitRegistry::contains(const std::string& symbol) const { return units_.count(symbol) != 0; }

const UnitDef& UnitRegistry::find(const std::string& symbol) const {
  const auto it = units_.find(symbol);
  if (it == units_.end()) throw SchemaError("unknown unit symbol '" + symbol + "'");
  return it->second;
}

std::vector<std::string> UnitRegistry::symbols() const {
  std::vector<std::string> out;
  out.reserve(units_.size());
  for (const auto& [symbol, _] : units_) out.push_back(symbol);
  return out;
}

double to_base_value(double x, const UnitDef& unit) { return x * unit.to_base_factor; }

double to_base_value(double x, const std::string& symbol, const UnitRegistry& registry) {
  return to_base_value(x, registry.find(symbol));
}

}  // namespace pireduce
