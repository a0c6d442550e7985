#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace regionkit {

enum class ErrorCode {
  InvalidParameters,
  InvalidArgument,
  NonFiniteState,
  StepSizeUnderflow,
  EventNotReached,
  AsymptoteAbscissa,
  DomainError,
  OutsideLoop,
  TangencyRootNotFound,
  ConditionE1Violated,
  ConditionE2Violated,
  SelfIntersectingBoundary,
  NoConvergence,
  SectionNeverHit,
  Io,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidParameters: return "InvalidParameters";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NonFiniteState: return "NonFiniteState";
    case ErrorCode::StepSizeUnderflow: return "StepSizeUnderflow";
    case ErrorCode::EventNotReached: return "EventNotReached";
    case ErrorCode::AsymptoteAbscissa: return "AsymptoteAbscissa";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::OutsideLoop: return "OutsideLoop";
    case ErrorCode::TangencyRootNotFound: return "TangencyRootNotFound";
    case ErrorCode::ConditionE1Violated: return "ConditionE1Violated";
    case ErrorCode::ConditionE2Violated: return "ConditionE2Violated";
    case ErrorCode::SelfIntersectingBoundary: return "SelfIntersectingBoundary";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::SectionNeverHit: return "SectionNeverHit";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a machine-readable code so
/// callers (notably the parameter scan) can branch on the failure kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace regionkit
