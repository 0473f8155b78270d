#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace notimind {

enum class ErrorCode {
  kIo,
  kInvalidArgument,
  kEmptyDistribution,
  kTooFewDistinctValues,
  kEmptyInput,
  kLengthMismatch,
  kConstantInput,
  kTooFewSamples,
  kUnknownFeatureName,
  kConstantColumn,
  kNonFiniteLoss,
  kNoConvergence,
  kArityMismatch,
  kTooFewRows,
  kSingleUser,
  kEmptyConfusion,
  kInvalidDataset,
  kInfeasibleCoupling,
  kMismatch,
  kBadFormat,
};

std::string_view error_code_name(ErrorCode code);

// Domain error carrying a machine-readable code. Everything the library
// throws on a contract violation is one of these.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace notimind
