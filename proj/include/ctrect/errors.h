#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ctrect {

enum class ErrorCode {
  kNoRealPreimage,
  kDegenerateLine,
  kSingularCamera,
  kIdenticallyZero,
  kIdenticallyZeroDeterminant,
  kDegenerateSelection,
  kNoFeasibleRoot,
  kNoValidModel,
  kRankDeficient,
  kRetryExhausted,
  kUnrectifiablePoint,
  kDegenerateU,
  kNoModelFound,
  kSchemaViolation,
  kIo,
};

std::string_view error_code_name(ErrorCode code);

// Every failure the library reports carries one of the codes above so the CLI
// can map it to a machine-readable error record.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ctrect
