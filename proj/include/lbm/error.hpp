#pragma once

#include <stdexcept>
#include <string>

namespace lbm {

enum class ErrorCode {
  kNonSymmetric,
  kSingularNegativePower,
  kInvalidParams,
  kActionOutOfSet,
  kLengthMismatch,
  kInvalidConfig,
  kUnplayedCandidate,
  kStateSpaceTooLarge,
  kSearchSpaceTooLarge,
  kMissingReference,
  kIo,
};

const char* to_string(ErrorCode code);

// Every failure raised by the library carries a machine-checkable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace lbm
