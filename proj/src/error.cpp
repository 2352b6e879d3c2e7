#include "mongerays/error.hpp"

namespace mongerays {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InputError: return "InputError";
    case ErrorKind::AsymmetricDistance: return "AsymmetricDistance";
    case ErrorKind::TriangleViolation: return "TriangleViolation";
    case ErrorKind::ZeroMeasure: return "ZeroMeasure";
    case ErrorKind::Disconnected: return "Disconnected";
    case ErrorKind::BadResolution: return "BadResolution";
    case ErrorKind::Infeasible: return "Infeasible";
    case ErrorKind::NumericFailure: return "NumericFailure";
    case ErrorKind::ClosureInflation: return "ClosureInflation";
    case ErrorKind::TransitivityFailure: return "TransitivityFailure";
    case ErrorKind::NotAChain: return "NotAChain";
    case ErrorKind::LeakOutsideTe: return "LeakOutsideTe";
    case ErrorKind::PushforwardMismatch: return "PushforwardMismatch";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::EmptyLevelSet: return "EmptyLevelSet";
    case ErrorKind::GapExceeded: return "GapExceeded";
  }
  return "Unknown";
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InputError:
    case ErrorKind::AsymmetricDistance:
    case ErrorKind::TriangleViolation:
    case ErrorKind::ZeroMeasure:
    case ErrorKind::Disconnected:
    case ErrorKind::BadResolution:
    case ErrorKind::Infeasible:
    case ErrorKind::EmptyLevelSet:
      return 2;
    case ErrorKind::NumericFailure:
    case ErrorKind::DomainError:
      return 3;
    case ErrorKind::ClosureInflation:
    case ErrorKind::TransitivityFailure:
    case ErrorKind::NotAChain:
    case ErrorKind::LeakOutsideTe:
    case ErrorKind::PushforwardMismatch:
    case ErrorKind::GapExceeded:
      return 4;
  }
  return 3;
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

}  // namespace mongerays
