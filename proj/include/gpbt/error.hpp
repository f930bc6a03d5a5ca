#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gpbt {

enum class ErrorKind {
  DomainError,
  NonFinite,
  CriticalPoint,
  NoRealRoot,
  Pole,
  RangeError,
  StepSizeUnderflow,
  BlowUp,
  AmplitudeCollapse,
  GridTooSmall,
  NonUniform,
  OutOfRange,
  DomainEscape,
  NegativeJacobian,
  QuadratureFailure,
  InvalidArgument,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::CriticalPoint: return "CriticalPoint";
    case ErrorKind::NoRealRoot: return "NoRealRoot";
    case ErrorKind::Pole: return "Pole";
    case ErrorKind::RangeError: return "RangeError";
    case ErrorKind::StepSizeUnderflow: return "StepSizeUnderflow";
    case ErrorKind::BlowUp: return "BlowUp";
    case ErrorKind::AmplitudeCollapse: return "AmplitudeCollapse";
    case ErrorKind::GridTooSmall: return "GridTooSmall";
    case ErrorKind::NonUniform: return "NonUniform";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::DomainEscape: return "DomainEscape";
    case ErrorKind::NegativeJacobian: return "NegativeJacobian";
    case ErrorKind::QuadratureFailure: return "QuadratureFailure";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

/// Numerical failure carrying a machine-readable kind. The message is
/// prefixed with the kind name so it survives being printed verbatim.
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

}  // namespace gpbt
