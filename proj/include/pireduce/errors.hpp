#pragma once

#include <stdexcept>
#include <string>

namespace pireduce {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define PIREDUCE_DEFINE_ERROR(Name)      \
  class Name : public Error {            \
   public:                               \
    using Error::Error;                  \
  };

PIREDUCE_DEFINE_ERROR(SchemaError)
PIREDUCE_DEFINE_ERROR(IngestError)
PIREDUCE_DEFINE_ERROR(ConfigError)
PIREDUCE_DEFINE_ERROR(SingularSystem)
PIREDUCE_DEFINE_ERROR(DegenerateDimensions)
PIREDUCE_DEFINE_ERROR(DimensionError)
PIREDUCE_DEFINE_ERROR(NumericError)
PIREDUCE_DEFINE_ERROR(DivisionByZero)
PIREDUCE_DEFINE_ERROR(ConstantColumn)
PIREDUCE_DEFINE_ERROR(SplitError)
PIREDUCE_DEFINE_ERROR(LogDomain)
PIREDUCE_DEFINE_ERROR(UndefinedScore)

#undef PIREDUCE_DEFINE_ERROR

/// Training produced a non-finite loss.
class Divergence : public Error {
 public:
  Divergence(const std::string& what, int epoch) : Error(what), epoch_(epoch) {}
  int epoch() const noexcept { return epoch_; }

 private:
  int epoch_;
};

}  // namespace pireduce
