#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ukgc {

enum class ErrorCode {
  UnknownRelation,
  ClassMismatch,
  MalformedLine,
  DuplicateTriplet,
  CountMismatch,
  EmptyDataset,
  UserWithoutInteractions,
  BadRatios,
  SaturatedUser,
  DimensionTooSmall,
  NonFiniteGradient,
  DivergedLoss,
  InfeasibleConfig,
  InvalidConfig,
  DimsMismatch,
  EmptyTestSet,
  BadCheckpoint,
  Io,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownRelation: return "UnknownRelation";
    case ErrorCode::ClassMismatch: return "ClassMismatch";
    case ErrorCode::MalformedLine: return "MalformedLine";
    case ErrorCode::DuplicateTriplet: return "DuplicateTriplet";
    case ErrorCode::CountMismatch: return "CountMismatch";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::UserWithoutInteractions: return "UserWithoutInteractions";
    case ErrorCode::BadRatios: return "BadRatios";
    case ErrorCode::SaturatedUser: return "SaturatedUser";
    case ErrorCode::DimensionTooSmall: return "DimensionTooSmall";
    case ErrorCode::NonFiniteGradient: return "NonFiniteGradient";
    case ErrorCode::DivergedLoss: return "DivergedLoss";
    case ErrorCode::InfeasibleConfig: return "InfeasibleConfig";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::DimsMismatch: return "DimsMismatch";
    case ErrorCode::EmptyTestSet: return "EmptyTestSet";
    case ErrorCode::BadCheckpoint: return "BadCheckpoint";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

// All library failures surface as ukgc::Error. `line()` is 1-based and only
// meaningful for parse errors (0 otherwise).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::size_t line = 0)
      : std::runtime_error(message), code_(code), line_(line) {}

  ErrorCode code() const noexcept { return code_; }
  std::size_t line() const noexcept { return line_; }

 private:
  ErrorCode code_;
  std::size_t line_;
};

}  // namespace ukgc
