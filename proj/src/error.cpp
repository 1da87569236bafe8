#include "hbid/error.hpp"

namespace hbid {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::SeriesTooShort: return "SeriesTooShort";
    case ErrorCode::ZeroSample: return "ZeroSample";
    case ErrorCode::WindowTooLong: return "WindowTooLong";
    case ErrorCode::InvalidHop: return "InvalidHop";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::AxisMismatch: return "AxisMismatch";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::KPrimeTooLarge: return "KPrimeTooLarge";
    case ErrorCode::KindMismatch: return "KindMismatch";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DegenerateCube: return "DegenerateCube";
    case ErrorCode::EmptyGrid: return "EmptyGrid";
    case ErrorCode::EmptyWindow: return "EmptyWindow";
    case ErrorCode::InvalidDuration: return "InvalidDuration";
    case ErrorCode::InvalidProfile: return "InvalidProfile";
    case ErrorCode::ScheduleEmpty: return "ScheduleEmpty";
    case ErrorCode::NonDivisibleLength: return "NonDivisibleLength";
    case ErrorCode::TooFewRows: return "TooFewRows";
    case ErrorCode::SingleClass: return "SingleClass";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::TooFewSessions: return "TooFewSessions";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::PerplexityTooLarge: return "PerplexityTooLarge";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ManifestError: return "ManifestError";
    case ErrorCode::FormatError: return "FormatError";
  }
  return "Unknown";
}

}  // namespace hbid
