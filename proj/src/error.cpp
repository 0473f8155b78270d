#include "notimind/error.hpp"

namespace notimind {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kEmptyDistribution: return "EmptyDistribution";
    case ErrorCode::kTooFewDistinctValues: return "TooFewDistinctValues";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kConstantInput: return "ConstantInput";
    case ErrorCode::kTooFewSamples: return "TooFewSamples";
    case ErrorCode::kUnknownFeatureName: return "UnknownFeatureName";
    case ErrorCode::kConstantColumn: return "ConstantColumn";
    case ErrorCode::kNonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::kNoConvergence: return "NoConvergence";
    case ErrorCode::kArityMismatch: return "ArityMismatch";
    case ErrorCode::kTooFewRows: return "TooFewRows";
    case ErrorCode::kSingleUser: return "SingleUser";
    case ErrorCode::kEmptyConfusion: return "EmptyConfusion";
    case ErrorCode::kInvalidDataset: return "InvalidDataset";
    case ErrorCode::kInfeasibleCoupling: return "InfeasibleCoupling";
    case ErrorCode::kMismatch: return "MismatchReport";
    case ErrorCode::kBadFormat: return "BadFormat";
  }
  return "Unknown";
}

}  // namespace notimind
