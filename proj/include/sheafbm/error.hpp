#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sheafbm {

enum class ErrorCode {
  DomainError,
  InvalidField,
  CutoffTooLow,
  NotAutomorphism,
  NotSaturated,
  UnsupportedType,
  ClosureUncertified,
  WNotInBox,
  NotOpen,
  SupportViolation,
  NotEndomorphism,
  NotComparable,
  InputError,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DomainError: return "DOMAIN_ERROR";
    case ErrorCode::InvalidField: return "INVALID_FIELD";
    case ErrorCode::CutoffTooLow: return "CUTOFF_TOO_LOW";
    case ErrorCode::NotAutomorphism: return "NOT_AUTOMORPHISM";
    case ErrorCode::NotSaturated: return "NOT_SATURATED";
    case ErrorCode::UnsupportedType: return "UNSUPPORTED_TYPE";
    case ErrorCode::ClosureUncertified: return "CLOSURE_UNCERTIFIED";
    case ErrorCode::WNotInBox: return "W_NOT_IN_BOX";
    case ErrorCode::NotOpen: return "NOT_OPEN";
    case ErrorCode::SupportViolation: return "SUPPORT_VIOLATION";
    case ErrorCode::NotEndomorphism: return "NOT_ENDOMORPHISM";
    case ErrorCode::NotComparable: return "NOT_COMPARABLE";
    case ErrorCode::InputError: return "INPUT_ERROR";
  }
  return "UNKNOWN";
}

}  // namespace sheafbm
