#include "fiberscan/error.hpp"

namespace fiberscan {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnreadable: return "unreadable";
    case ErrorCode::kMalformedHeader: return "malformed-header";
    case ErrorCode::kUnsupportedFormat: return "unsupported-format";
    case ErrorCode::kUnwritable: return "unwritable";
    case ErrorCode::kInvalidImage: return "invalid-image";
    case ErrorCode::kTooSmall: return "too-small";
    case ErrorCode::kInvalidConfig: return "invalid-config";
    case ErrorCode::kInvalidSpec: return "invalid-spec";
    case ErrorCode::kLengthMismatch: return "length-mismatch";
    case ErrorCode::kCorpus: return "corpus";
  }
  return "unknown";
}

}  // namespace fiberscan
