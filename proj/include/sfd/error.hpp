#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sfd {

enum class ErrorCode {
  kInvalidArgument,
  kDimensionMismatch,
  kCapExceeded,
  kNumericalFailure,
  kNotInHull,
  kNotInHullSum,
  kUnsupportedDim,
  kOracleFailure,
  kInfeasible,
  kInvalidSparsity,
  kRankDeficient,
  kSmoothnessViolated,
  kResampleLimit,
  kIoError,
};

std::string_view error_code_name(ErrorCode code);

// Every failure surfaced by the library. `code()` identifies the contract
// violated; the message carries the diagnostics.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace sfd
