#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace yamabe {

enum class ErrorCode {
  SubcriticalViolation,
  NoBracket,
  TailTooShort,
  SingularSystem,
  ExponentMismatch,
  NotUnit,
  PoleSingularity,
  NoInteriorCritical,
  AntipodalPair,
  InjectivityViolation,
  ResolutionTooCoarse,
  InvalidArgument,
  Io,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::SubcriticalViolation: return "SubcriticalViolation";
    case ErrorCode::NoBracket: return "NoBracket";
    case ErrorCode::TailTooShort: return "TailTooShort";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::ExponentMismatch: return "ExponentMismatch";
    case ErrorCode::NotUnit: return "NotUnit";
    case ErrorCode::PoleSingularity: return "PoleSingularity";
    case ErrorCode::NoInteriorCritical: return "NoInteriorCritical";
    case ErrorCode::AntipodalPair: return "AntipodalPair";
    case ErrorCode::InjectivityViolation: return "InjectivityViolation";
    case ErrorCode::ResolutionTooCoarse: return "ResolutionTooCoarse";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above; the CLI
/// turns it into {"error": code, "detail": what()}.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(detail), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace yamabe
