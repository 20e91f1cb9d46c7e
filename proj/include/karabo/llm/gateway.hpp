#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "karabo/llm/ledger.hpp"
#include "karabo/llm/types.hpp"

namespace karabo::llm {

struct RetryPolicy {
  int max_retries = 3;
  std::chrono::milliseconds base_delay{250};
  double multiplier = 2.0;
  std::chrono::milliseconds max_delay{8000};
  /// Seeds the backoff jitter so retry schedules are reproducible.
  std::uint64_t jitter_seed = 0;
};

struct GatewayOptions {
  RetryPolicy retry;
  /// Maximum provider calls in flight at once; 0 means unbounded.
  std::size_t max_in_flight = 8;
  /// Replaceable for tests; defaults to std::this_thread::sleep_for.
  std::function<void(std::chrono::milliseconds)> sleep;
};

struct RetryEvent {
  std::string stage;
  int attempt = 0;  // 1-based attempt that failed
  int status = 0;
  std::chrono::milliseconds delay{0};
  std::string message;
};

/// The one entry point to text generation. Adds bounded retries with
/// exponential backoff, an in-flight cap, and usage accounting on top of a
/// Backend. Shareable across threads.
class Gateway {
 public:
  explicit Gateway(std::shared_ptr<Backend> backend, GatewayOptions options = {});

  /// Non-empty generated text. Throws E_PROVIDER, E_RATE_LIMIT or
  /// E_EMPTY_COMPLETION.
  std::string complete(const ChatRequest& request);

  /// Throws E_PROVIDER, E_RATE_LIMIT, or E_DEGENERATE when both
  /// probabilities are zero.
  BooleanVerdict judge(const JudgeQuery& query);
  BooleanVerdict judge(std::string_view context, std::string_view question);

  UsageLedger& ledger() { return ledger_; }
  const UsageLedger& ledger() const { return ledger_; }
  std::vector<RetryEvent> retry_log() const;

  /// Delay before retry number `retry` (1-based) of a request with key `key`.
  std::chrono::milliseconds backoff_delay(int retry, std::uint64_t key) const;

 private:
  template <typename Call>
  auto with_retries(const std::string& stage, std::uint64_t key, Call&& call);

  class InFlightSlot;

  std::shared_ptr<Backend> backend_;
  GatewayOptions options_;
  UsageLedger ledger_;

  mutable std::mutex log_mu_;
  std::vector<RetryEvent> retry_log_;

  std::mutex slot_mu_;
  std::condition_variable slot_cv_;
  std::size_t in_flight_ = 0;
};

}  // namespace karabo::llm
