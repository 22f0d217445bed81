#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace iffm {

enum class ErrorCode {
  NotMetzler,
  NotHurwitz,
  NonPositiveInput,
  SingularMatrix,
  DimensionMismatch,
  DomainViolation,
  StepFailure,
  UnsupportedKind,
  NoSteadyState,
  InvalidArgument,
  ConfigError,
  MissingVerdict,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotMetzler: return "NotMetzler";
    case ErrorCode::NotHurwitz: return "NotHurwitz";
    case ErrorCode::NonPositiveInput: return "NonPositiveInput";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DomainViolation: return "DomainViolation";
    case ErrorCode::StepFailure: return "StepFailure";
    case ErrorCode::UnsupportedKind: return "UnsupportedKind";
    case ErrorCode::NoSteadyState: return "NoSteadyState";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::MissingVerdict: return "MissingVerdict";
  }
  return "Unknown";
}

/// Base of every error thrown by the library. Carries a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// A guarded denominator (K + c^T x) fell below the floor, or u left its domain.
class DomainViolation : public Error {
 public:
  DomainViolation(double t, const std::string& what)
      : Error(ErrorCode::DomainViolation, what), t_(t) {}

  /// Time at which the violation was detected; NaN when not integrating.
  double time() const noexcept { return t_; }

 private:
  double t_;
};

class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what)
      : Error(ErrorCode::ConfigError, field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace iffm
