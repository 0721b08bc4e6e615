#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qmet {

enum class ErrorCode {
  NonHermitianInput,
  NonUnitaryInput,
  InvalidState,
  DimensionMismatch,
  DegenerateSpectrum,
  InvalidParameter,
  UnknownReference,
  DomainBoundary,
  NonNormalized,
  NotTraceless,
  RankChange,
  RankDeficient,
  UnknownMetricTag,
  InvalidPovm,
  NonSmoothFamily,
  AliasingRisk,
  OracleTooLarge,
  ConfigError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonHermitianInput: return "NonHermitianInput";
    case ErrorCode::NonUnitaryInput: return "NonUnitaryInput";
    case ErrorCode::InvalidState: return "InvalidState";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DegenerateSpectrum: return "DegenerateSpectrum";
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::UnknownReference: return "UnknownReference";
    case ErrorCode::DomainBoundary: return "DomainBoundary";
    case ErrorCode::NonNormalized: return "NonNormalized";
    case ErrorCode::NotTraceless: return "NotTraceless";
    case ErrorCode::RankChange: return "RankChange";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::UnknownMetricTag: return "UnknownMetricTag";
    case ErrorCode::InvalidPovm: return "InvalidPovm";
    case ErrorCode::NonSmoothFamily: return "NonSmoothFamily";
    case ErrorCode::AliasingRisk: return "AliasingRisk";
    case ErrorCode::OracleTooLarge: return "OracleTooLarge";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so that
/// callers (the CLI in particular) can map it onto a stable exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace qmet
