#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bftsmpc {

enum class ErrorCode {
  NegativeMass,
  NormalizationViolation,
  EmptySetMass,
  InvalidFrame,
  HypothesisNotInSet,
  DegenerateOpinion,
  AllSingletonsZero,
  InvalidCovariance,
  InvalidParameter,
  DomainError,
  NonFiniteModel,
  ScenarioInvalid,
  EmptyTrace,
  ParseError,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers (and the CLI's exit-code mapping) can dispatch without parsing text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NegativeMass: return "NegativeMass";
    case ErrorCode::NormalizationViolation: return "NormalizationViolation";
    case ErrorCode::EmptySetMass: return "EmptySetMass";
    case ErrorCode::InvalidFrame: return "InvalidFrame";
    case ErrorCode::HypothesisNotInSet: return "HypothesisNotInSet";
    case ErrorCode::DegenerateOpinion: return "DegenerateOpinion";
    case ErrorCode::AllSingletonsZero: return "AllSingletonsZero";
    case ErrorCode::InvalidCovariance: return "InvalidCovariance";
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::NonFiniteModel: return "NonFiniteModel";
    case ErrorCode::ScenarioInvalid: return "ScenarioInvalid";
    case ErrorCode::EmptyTrace: return "EmptyTrace";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace bftsmpc
