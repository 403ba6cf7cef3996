#pragma once

#include <stdexcept>
#include <string>

namespace schottky {

// Every failure raised by the library is an Error. The code names the
// violated contract; the CLI maps ParseError to exit 1, Internal to exit 3
// and everything else to exit 2.
enum class ErrorCode {
  Parse,
  DivisionByZero,
  Domain,
  ShapeMismatch,
  NotNilpotent,
  NotUnipotent,
  NotInvertible,
  NonCommuting,
  SurfaceRelationViolated,
  GeneratorOutOfRange,
  GroupMismatch,
  InvalidCocycle,
  NotExact,
  CoefficientMismatch,
  BackendMismatch,
  InvalidGroup,
  Unsupported,
  Internal,
};

inline const char* error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::Parse: return "ParseError";
    case ErrorCode::DivisionByZero: return "DivisionByZero";
    case ErrorCode::Domain: return "DomainError";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NotNilpotent: return "NotNilpotent";
    case ErrorCode::NotUnipotent: return "NotUnipotent";
    case ErrorCode::NotInvertible: return "NotInvertible";
    case ErrorCode::NonCommuting: return "NonCommuting";
    case ErrorCode::SurfaceRelationViolated: return "SurfaceRelationViolated";
    case ErrorCode::GeneratorOutOfRange: return "GeneratorOutOfRange";
    case ErrorCode::GroupMismatch: return "GroupMismatch";
    case ErrorCode::InvalidCocycle: return "InvalidCocycle";
    case ErrorCode::NotExact: return "NotExact";
    case ErrorCode::CoefficientMismatch: return "CoefficientMismatch";
    case ErrorCode::BackendMismatch: return "BackendMismatch";
    case ErrorCode::InvalidGroup: return "InvalidGroup";
    case ErrorCode::Unsupported: return "Unsupported";
    case ErrorCode::Internal: return "InternalInvariantBreach";
  }
  return "Error";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(error_name(code)) + ": " + detail),
        code_(code),
        detail_(detail) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

// An Error that also carries a witness value (a residual matrix, the
// offending power, ...). W is usually a Matrix.
template <typename W>
class WitnessError : public Error {
 public:
  WitnessError(ErrorCode code, const std::string& detail, W witness)
      : Error(code, detail), witness_(std::move(witness)) {}

  const W& witness() const noexcept { return witness_; }

 private:
  W witness_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& detail) {
  throw Error(code, detail);
}

}  // namespace schottky
