#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace karabo {

enum class ErrorCode {
  Schema,
  Provider,
  RateLimit,
  EmptyCompletion,
  Degenerate,
  Template,
  EmptyInput,
  Upstream,
  EmptyDataset,
  Range,
  Config,
  NotFound,
  Io,
};

/// Stable machine-readable name, e.g. "E_SCHEMA".
std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  std::string_view code_name() const { return error_code_name(code_); }

 private:
  ErrorCode code_;
};

/// Failure reported by an LLM provider. `status` is the HTTP status (0 for
/// transport failures); `retryable` marks failures the gateway may retry.
class ProviderError : public Error {
 public:
  ProviderError(int status, bool retryable, const std::string& message)
      : Error(status == 429 ? ErrorCode::RateLimit : ErrorCode::Provider, message),
        status_(status),
        retryable_(retryable) {}

  int status() const noexcept { return status_; }
  bool retryable() const noexcept { return retryable_; }

 private:
  int status_;
  bool retryable_;
};

}  // namespace karabo
