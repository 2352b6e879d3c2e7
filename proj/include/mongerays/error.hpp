#pragma once

#include <stdexcept>
#include <string>

namespace mongerays {

enum class ErrorKind {
  InputError,
  AsymmetricDistance,
  TriangleViolation,
  ZeroMeasure,
  Disconnected,
  BadResolution,
  Infeasible,
  NumericFailure,
  ClosureInflation,
  TransitivityFailure,
  NotAChain,
  LeakOutsideTe,
  PushforwardMismatch,
  DomainError,
  EmptyLevelSet,
  GapExceeded,
};

const char* to_string(ErrorKind kind);

// CLI exit status: 2 input error, 3 numeric failure, 4 gap/invariant violation.
int exit_code(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace mongerays
