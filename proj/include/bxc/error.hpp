#pragma once

#include <stdexcept>
#include <string>

namespace bxc {

enum class ErrorCode {
  kInvalidArgument,
  kDegenerateChannel,
  kNoNullSpace,
  kUnderdetermined,
  kInconsistentSystem,
  kOutsideHypothesis,
  kUnsupportedShape,
  kInfeasible,
  kMalformedScheme,
  kDimensionMismatch,
  kOutsideRegime,
};

// All library failures surface as bxc::Error; code() lets callers branch
// without parsing the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace bxc
