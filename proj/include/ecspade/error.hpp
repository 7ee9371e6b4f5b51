#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ecspade {

enum class ErrorCode {
  DimMismatch,
  NotSPD,
  NotSymmetric,
  BadNu,
  ZeroTarget,
  IdentityMismatch,
  BadBeta,
  EmptyInput,
  OutOfRange,
  InvalidScenario,
  Numerical,
};

std::string_view to_string(ErrorCode code);

/// Exception carrying a machine-readable code alongside the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ecspade
