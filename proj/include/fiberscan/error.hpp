#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fiberscan {

enum class ErrorCode {
  kUnreadable,
  kMalformedHeader,
  kUnsupportedFormat,
  kUnwritable,
  kInvalidImage,
  kTooSmall,
  kInvalidConfig,
  kInvalidSpec,
  kLengthMismatch,
  kCorpus,
};

std::string_view to_string(ErrorCode code);

/// Library-wide exception. `stage()` is filled in by the pipeline to say
/// which step of the detector raised it (empty outside the pipeline).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string stage = {})
      : std::runtime_error(message), code_(code), stage_(std::move(stage)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& stage() const noexcept { return stage_; }

 private:
  ErrorCode code_;
  std::string stage_;
};

}  // namespace fiberscan
