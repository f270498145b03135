#pragma once

#include <stdexcept>
#include <string>

namespace fbns {

/// Base class for every error raised by the library. `kind()` is a stable
/// machine-readable tag used by the CLI to pick an exit code.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(kind + ": " + what), kind_(std::move(kind)), message_(what) {}
  const std::string& kind() const noexcept { return kind_; }
  /// what() without the kind prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  std::string kind_;
  std::string message_;
};

#define FBNS_DEFINE_ERROR(Name)                                              \
  class Name : public Error {                                               \
   public:                                                                  \
    explicit Name(const std::string& what) : Error(#Name, what) {}          \
  }

// grid / kinematics
FBNS_DEFINE_ERROR(InvalidResolution);
FBNS_DEFINE_ERROR(NonFiniteState);
FBNS_DEFINE_ERROR(DegenerateJacobian);
FBNS_DEFINE_ERROR(GridMismatch);

// initial data
FBNS_DEFINE_ERROR(DecayViolation);
FBNS_DEFINE_ERROR(VacuumConditionViolation);
FBNS_DEFINE_ERROR(PositivityViolation);
FBNS_DEFINE_ERROR(UnboundedDerivative);
FBNS_DEFINE_ERROR(InvalidParameter);

// linear solver / picard
FBNS_DEFINE_ERROR(SingularMass);
FBNS_DEFINE_ERROR(LinearSolveFailure);
FBNS_DEFINE_ERROR(AprioriViolated);
FBNS_DEFINE_ERROR(MaxIterExceeded);
FBNS_DEFINE_ERROR(NonContraction);

// diagnostics
FBNS_DEFINE_ERROR(InsufficientHistory);
FBNS_DEFINE_ERROR(NonPositiveState);
FBNS_DEFINE_ERROR(TraceViolation);
FBNS_DEFINE_ERROR(UnsupportedExponent);

// io
FBNS_DEFINE_ERROR(ParseError);
FBNS_DEFINE_ERROR(ValidationError);
FBNS_DEFINE_ERROR(FormatError);

#undef FBNS_DEFINE_ERROR

}  // namespace fbns
