#include "admpriors/error.hpp"

namespace admpriors {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NearSingular: return "NearSingular";
    case ErrorCode::NonPositive: return "NonPositive";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::QuadratureNonConvergence: return "QuadratureNonConvergence";
    case ErrorCode::UnsupportedFamily: return "UnsupportedFamily";
    case ErrorCode::EigenvalueSign: return "EigenvalueSign";
    case ErrorCode::MatchingTolerance: return "MatchingTolerance";
    case ErrorCode::AllPathsCensored: return "AllPathsCensored";
    case ErrorCode::WeightOverflow: return "WeightOverflow";
    case ErrorCode::BrownResidual: return "BrownResidual";
    case ErrorCode::Config: return "Config";
  }
  return "Unknown";
}

}  // namespace admpriors
