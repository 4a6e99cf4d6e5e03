#pragma once

#include <stdexcept>
#include <string>

namespace thermo {

// Exit-code family a failure belongs to when surfaced through the CLI.
enum class ErrorKind { config = 2, numerical_cap = 3, domain = 4 };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string name, const std::string& what)
      : std::runtime_error(what), kind_(kind), name_(std::move(name)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& name() const noexcept { return name_; }

 private:
  ErrorKind kind_;
  std::string name_;
};

#define THERMO_DEFINE_ERROR(Type, Kind)                                        \
  class Type : public Error {                                                  \
   public:                                                                     \
    explicit Type(const std::string& what) : Error(ErrorKind::Kind, #Type, what) {} \
  };

THERMO_DEFINE_ERROR(ConfigError, config)
THERMO_DEFINE_ERROR(NotPrimitive, config)
THERMO_DEFINE_ERROR(DegenerateRow, config)
THERMO_DEFINE_ERROR(InvalidArgument, config)
THERMO_DEFINE_ERROR(ResolutionTooFine, numerical_cap)
THERMO_DEFINE_ERROR(TableTooLarge, numerical_cap)
THERMO_DEFINE_ERROR(NonIrreducible, numerical_cap)
THERMO_DEFINE_ERROR(NotInLPhi, domain)
THERMO_DEFINE_ERROR(BoundaryAlpha, domain)
THERMO_DEFINE_ERROR(OrderMismatch, domain)
THERMO_DEFINE_ERROR(RangeEscapesLPhi, domain)
THERMO_DEFINE_ERROR(NotHomogeneous, domain)
THERMO_DEFINE_ERROR(NotNormalized, domain)
THERMO_DEFINE_ERROR(NotFullDimensional, domain)

#undef THERMO_DEFINE_ERROR

}  // namespace thermo
