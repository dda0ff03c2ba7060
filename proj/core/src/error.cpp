#include "vidalign/error.hpp"

namespace vidalign {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kAllMissing: return "AllMissing";
    case ErrorCode::kDegenerateBox: return "DegenerateBox";
    case ErrorCode::kLengthTooShort: return "LengthTooShort";
    case ErrorCode::kEmptyIntersection: return "EmptyIntersection";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kBadWindow: return "BadWindow";
    case ErrorCode::kDimMismatch: return "DimMismatch";
    case ErrorCode::kPhaseCountMismatch: return "PhaseCountMismatch";
    case ErrorCode::kNonMonotoneAnchors: return "NonMonotoneAnchors";
    case ErrorCode::kEndpointMismatch: return "EndpointMismatch";
    case ErrorCode::kEmptyTrainSet: return "EmptyTrainSet";
    case ErrorCode::kTooFewVideos: return "TooFewVideos";
    case ErrorCode::kTooShort: return "TooShort";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kInvalidAnnotation: return "InvalidAnnotation";
    case ErrorCode::kSchema: return "Schema";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

}  // namespace vidalign
