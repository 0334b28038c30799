#pragma once

#include <stdexcept>
#include <string>

namespace lastmile {

// Every failure the library reports, so callers can branch on the kind
// without string matching. The CLI maps any Error to exit code 1.
enum class ErrorCode {
  SchedulingInPast,
  NonPositiveRate,
  ConfigInvalid,
  AxisTooShort,
  MalformedJson,
  EmptyDocument,
  PathNotFound,
  EmptyTrack,
  EmptyWindow,
  DegenerateOD,
};

inline const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::SchedulingInPast: return "SchedulingInPast";
    case ErrorCode::NonPositiveRate: return "NonPositiveRate";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::AxisTooShort: return "AxisTooShort";
    case ErrorCode::MalformedJson: return "MalformedJson";
    case ErrorCode::EmptyDocument: return "EmptyDocument";
    case ErrorCode::PathNotFound: return "PathNotFound";
    case ErrorCode::EmptyTrack: return "EmptyTrack";
    case ErrorCode::EmptyWindow: return "EmptyWindow";
    case ErrorCode::DegenerateOD: return "DegenerateOD";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace lastmile
