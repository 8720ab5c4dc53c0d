#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tsurf {

enum class ErrorKind {
  DegenerateFrame,
  GridTooSmall,
  InvalidField,
  AmbiguousType,
  DivisionGuard,
  TypeMismatch,
  NotIsotropic,
  MinimalPoint,
  StepUnstable,
  IncompatibleData,
  DomainMismatch,
  MissingFrames,
  ProbeInfeasible,
  Io,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DegenerateFrame: return "DegenerateFrame";
    case ErrorKind::GridTooSmall: return "GridTooSmall";
    case ErrorKind::InvalidField: return "InvalidField";
    case ErrorKind::AmbiguousType: return "AmbiguousType";
    case ErrorKind::DivisionGuard: return "DivisionGuard";
    case ErrorKind::TypeMismatch: return "TypeMismatch";
    case ErrorKind::NotIsotropic: return "NotIsotropic";
    case ErrorKind::MinimalPoint: return "MinimalPoint";
    case ErrorKind::StepUnstable: return "StepUnstable";
    case ErrorKind::IncompatibleData: return "IncompatibleData";
    case ErrorKind::DomainMismatch: return "DomainMismatch";
    case ErrorKind::MissingFrames: return "MissingFrames";
    case ErrorKind::ProbeInfeasible: return "ProbeInfeasible";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

/// Single exception type for the library; `kind()` drives CLI exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), detail_(what) {}

  ErrorKind kind() const noexcept { return kind_; }
  /// The message without the kind prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

}  // namespace tsurf
