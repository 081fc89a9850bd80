#pragma once

#include <stdexcept>
#include <string>

namespace ers {

enum class ErrorCode {
  MissingField,
  InvalidValue,
  ParseError,
  InvalidGeometry,
  InvalidMix,
  NegativeEnergy,
  NegativeKwh,
  ZeroSpeed,
  UnknownProfile,
  InsufficientHistory,
  DuplicateSession,
  SessionClosed,
};

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::MissingField: return "MISSING_FIELD";
    case ErrorCode::InvalidValue: return "INVALID_VALUE";
    case ErrorCode::ParseError: return "PARSE_ERROR";
    case ErrorCode::InvalidGeometry: return "INVALID_GEOMETRY";
    case ErrorCode::InvalidMix: return "INVALID_MIX";
    case ErrorCode::NegativeEnergy: return "NEGATIVE_ENERGY";
    case ErrorCode::NegativeKwh: return "NEGATIVE_KWH";
    case ErrorCode::ZeroSpeed: return "ZERO_SPEED";
    case ErrorCode::UnknownProfile: return "UNKNOWN_PROFILE";
    case ErrorCode::InsufficientHistory: return "INSUFFICIENT_HISTORY";
    case ErrorCode::DuplicateSession: return "DUPLICATE_SESSION";
    case ErrorCode::SessionClosed: return "SESSION_CLOSED";
  }
  return "UNKNOWN";
}

class SimError : public std::runtime_error {
public:
  SimError(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + detail),
        code_(code) {}

  ErrorCode code() const { return code_; }

private:
  ErrorCode code_;
};

} // namespace ers
