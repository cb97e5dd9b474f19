#include "invp/error.hpp"

namespace invp {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidInput: return "InvalidInput";
    case ErrorCode::kNonMarkov: return "NonMarkov";
    case ErrorCode::kNotExpanding: return "NotExpanding";
    case ErrorCode::kReducible: return "Reducible";
    case ErrorCode::kResourceLimit: return "ResourceLimit";
    case ErrorCode::kInadmissible: return "Inadmissible";
    case ErrorCode::kContractionViolated: return "ContractionViolated";
    case ErrorCode::kImageEscapes: return "ImageEscapes";
    case ErrorCode::kCountMismatch: return "CountMismatch";
    case ErrorCode::kUnsupported: return "Unsupported";
    case ErrorCode::kDepthExhausted: return "DepthExhausted";
    case ErrorCode::kNotShadowed: return "NotShadowed";
    case ErrorCode::kNotRecoded: return "NotRecoded";
    case ErrorCode::kNoSignChange: return "NoSignChange";
    case ErrorCode::kNotMonotone: return "NotMonotone";
    case ErrorCode::kEpsilonTooLarge: return "EpsilonTooLarge";
    case ErrorCode::kUncoverable: return "Uncoverable";
    case ErrorCode::kRhoOutOfRange: return "RhoOutOfRange";
    case ErrorCode::kScaleTooFine: return "ScaleTooFine";
    case ErrorCode::kConfigInvalid: return "ConfigInvalid";
  }
  return "Unknown";
}

}  // namespace invp
