#pragma once

// Exact rational scalar for dimension exponents and Pi-exponent systems.
// Arbitrary precision, so elimination never overflows.

#include <string>

#include <Eigen/Core>
#include <boost/multiprecision/cpp_int.hpp>

namespace pireduce {

using BigInt = boost::multiprecision::number<boost::multiprecision::cpp_int_backend<>,
                                             boost::multiprecision::et_off>;
using Rational = boost::multiprecision::number<
    boost::multiprecision::rational_adaptor<boost::multiprecision::cpp_int_backend<>>,
    boost::multiprecision::et_off>;

/// Parses "p", "-p" or "p/q". Throws SchemaError on malformed text or q == 0.
Rational parse_rational(const std::string& text);

/// "p/q" in lowest terms, or "p" when the denominator is 1.
std::string format_rational(const Rational& r);

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

}  // namespace pireduce

namespace Eigen {

template <>
struct NumTraits<pireduce::Rational> : GenericNumTraits<pireduce::Rational> {
  using Real = pireduce::Rational;
  using NonInteger = pireduce::Rational;
  using Nested = pireduce::Rational;
  using Literal = pireduce::Rational;

  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 20,
    AddCost = 50,
    MulCost = 100
  };

  static inline Real epsilon() { return Real(0); }
  static inline Real dummy_precision() { return Real(0); }
  static inline int digits10() { return 0; }
};

}  // namespace Eigen
