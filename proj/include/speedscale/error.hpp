#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace speedscale {

enum class ErrorKind {
  UnknownJobId,
  InvalidGamma,
  InfeasibleInstance,
  WrongMachineCount,
  WrongFamily,
  BadAnchor,
  TooLarge,
  InfeasibleOrder,
  GenerationFailure,
  ParseError,
  ValidationError,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::UnknownJobId: return "UnknownJobId";
    case ErrorKind::InvalidGamma: return "InvalidGamma";
    case ErrorKind::InfeasibleInstance: return "InfeasibleInstance";
    case ErrorKind::WrongMachineCount: return "WrongMachineCount";
    case ErrorKind::WrongFamily: return "WrongFamily";
    case ErrorKind::BadAnchor: return "BadAnchor";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::InfeasibleOrder: return "InfeasibleOrder";
    case ErrorKind::GenerationFailure: return "GenerationFailure";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ValidationError: return "ValidationError";
  }
  return "Unknown";
}

// All library failures surface as this exception; callers branch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace speedscale
