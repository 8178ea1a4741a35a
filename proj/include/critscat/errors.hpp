#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace critscat {

enum class ErrorCode {
  InvalidArgument,
  AnnulusTooWide,
  AnnulusEmpty,
  ToleranceNotMet,
  WindowTooNarrow,
  ZeroTime,
  ScaleOverflow,
  DegenerateTime,
  StepUnderflow,
  AliasingDetected,
  DomainEscape,
  DivergentIntegral,
  ShortRangeInput,
  ConfigError,
  IoError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::AnnulusTooWide: return "AnnulusTooWide";
    case ErrorCode::AnnulusEmpty: return "AnnulusEmpty";
    case ErrorCode::ToleranceNotMet: return "ToleranceNotMet";
    case ErrorCode::WindowTooNarrow: return "WindowTooNarrow";
    case ErrorCode::ZeroTime: return "ZeroTime";
    case ErrorCode::ScaleOverflow: return "ScaleOverflow";
    case ErrorCode::DegenerateTime: return "DegenerateTime";
    case ErrorCode::StepUnderflow: return "StepUnderflow";
    case ErrorCode::AliasingDetected: return "AliasingDetected";
    case ErrorCode::DomainEscape: return "DomainEscape";
    case ErrorCode::DivergentIntegral: return "DivergentIntegral";
    case ErrorCode::ShortRangeInput: return "ShortRangeInput";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

/// Single exception type for the library; callers dispatch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) throw Error(code, what);
}

}  // namespace critscat
