#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace me2f {

enum class ErrorCode {
  kNonMonotonicDates,
  kNegativePrice,
  kLowAboveHigh,
  kInvalidParams,
  kInsufficientHistory,
  kZeroPrevClose,
  kDegenerateUniverse,
  kNonPositiveScale,
  kMissingBaseChain,
  kEmptyUniverse,
  kUnknownToken,
  kInvalidShares,
  kZeroCumulativeShare,
  kHOutOfRange,
  kFgiOutOfRange,
  kWindowTooShort,
  kMalformedRow,
  kSchemaMismatch,
  kEmptyFile,
  kNegativeShare,
  kSumExceedsOne,
  kHttpError,
  kRateLimited,
  kParseError,
  kPartialRange,
  kCacheCorrupt,
  kIoError,
  kConfigError,
  kMissingReport,
  kInvalidAggregate,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so that
/// callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace me2f
