#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hbid {

enum class ErrorCode {
  // signal-core
  SeriesTooShort,
  ZeroSample,
  WindowTooLong,
  InvalidHop,
  InvalidArgument,
  // mfcc
  IndexOutOfRange,
  AxisMismatch,
  EmptyInput,
  KPrimeTooLarge,
  KindMismatch,
  DimensionMismatch,
  // radar-frontend
  DegenerateCube,
  EmptyGrid,
  EmptyWindow,
  // synth
  InvalidDuration,
  InvalidProfile,
  ScheduleEmpty,
  NonDivisibleLength,
  // classify
  TooFewRows,
  SingleClass,
  NoConvergence,
  DimMismatch,
  TooFewSessions,
  LengthMismatch,
  // embedding
  DegenerateInput,
  PerplexityTooLarge,
  // io / cli
  IoError,
  ManifestError,
  FormatError,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace hbid
