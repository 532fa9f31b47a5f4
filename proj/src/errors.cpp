#include "dfrc/errors.hpp"

namespace dfrc {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonHermitian: return "NonHermitian";
    case ErrorCode::NotPsd: return "NotPSD";
    case ErrorCode::SingularFim: return "SingularFIM";
    case ErrorCode::SingularCovariance: return "SingularCovariance";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::DegenerateChannel: return "DegenerateChannel";
    case ErrorCode::ZeroUsefulPower: return "ZeroUsefulPower";
    case ErrorCode::ResidualNotPsd: return "ResidualNotPSD";
    case ErrorCode::TooManyStreams: return "TooManyStreams";
    case ErrorCode::SingularGram: return "SingularGram";
    case ErrorCode::DegenerateSignal: return "DegenerateSignal";
    case ErrorCode::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorCode::SolverFailure: return "SolverFailure";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace dfrc
