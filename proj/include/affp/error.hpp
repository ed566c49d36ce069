#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace affp {

enum class ErrorCode {
  SingularMatrix,
  Overflow,
  DegenerateSpectrum,
  NotPositiveDefinite,
  NotARotation,
  NotOrientationPreserving,
  OutOfRange,
  DegenerateTriangle,
  OrientationFlip,
  SolverNotConverged,
  InvalidArgument,
  ParseError,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::DegenerateSpectrum: return "DegenerateSpectrum";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::NotARotation: return "NotARotation";
    case ErrorCode::NotOrientationPreserving: return "NotOrientationPreserving";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::DegenerateTriangle: return "DegenerateTriangle";
    case ErrorCode::OrientationFlip: return "OrientationFlip";
    case ErrorCode::SolverNotConverged: return "SolverNotConverged";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

// Every failure raised by the library carries one of the codes above so that
// callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), message_(what) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }
  // what() without the code prefix
  [[nodiscard]] const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

}  // namespace affp
