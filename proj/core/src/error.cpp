#include "contain/error.hpp"

namespace contain {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::Singular: return "Singular";
    case ErrorCode::NotControllable: return "NotControllable";
    case ErrorCode::NotObservable: return "NotObservable";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::BadAdjacency: return "BadAdjacency";
    case ErrorCode::NoLeader: return "NoLeader";
    case ErrorCode::NoFollower: return "NoFollower";
    case ErrorCode::AssumptionViolated: return "AssumptionViolated";
    case ErrorCode::EmptyGammas: return "EmptyGammas";
    case ErrorCode::NonPositiveAlpha: return "NonPositiveAlpha";
    case ErrorCode::VarrhoTooLarge: return "VarrhoTooLarge";
    case ErrorCode::MissingState: return "MissingState";
    case ErrorCode::NonFiniteState: return "NonFiniteState";
    case ErrorCode::Parse: return "Parse";
  }
  return "Unknown";
}

}  // namespace contain
