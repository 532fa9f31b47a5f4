#pragma once

#include <stdexcept>
#include <string>

namespace dfrc {

enum class ErrorCode {
  InvalidArgument,
  DimensionMismatch,
  NonHermitian,
  NotPsd,
  SingularFim,
  SingularCovariance,
  Infeasible,
  DegenerateChannel,
  ZeroUsefulPower,
  ResidualNotPsd,
  TooManyStreams,
  SingularGram,
  DegenerateSignal,
  DegenerateDenominator,
  SolverFailure,
  ConfigError,
};

const char* to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so the
/// CLI can map it to an exit status without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace dfrc
