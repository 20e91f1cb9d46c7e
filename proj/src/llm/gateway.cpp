#include "karabo/llm/gateway.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "karabo/error.hpp"
#include "karabo/text.hpp"

namespace karabo::llm {

class Gateway::InFlightSlot {
 public:
  explicit InFlightSlot(Gateway& g) : g_(g) {
    std::unique_lock lock(g_.slot_mu_);
    if (g_.options_.max_in_flight > 0) {
      g_.slot_cv_.wait(lock, [&] { return g_.in_flight_ < g_.options_.max_in_flight; });
    }
    ++g_.in_flight_;
  }
  ~InFlightSlot() {
    {
      std::lock_guard lock(g_.slot_mu_);
      --g_.in_flight_;
    }
    g_.slot_cv_.notify_one();
  }
  InFlightSlot(const InFlightSlot&) = delete;
  InFlightSlot& operator=(const InFlightSlot&) = delete;

 private:
  Gateway& g_;
};

Gateway::Gateway(std::shared_ptr<Backend> backend, GatewayOptions options)
    : backend_(std::move(backend)), options_(std::move(options)) {
  if (!backend_) throw Error(ErrorCode::Config, "gateway needs a backend");
  if (options_.retry.max_retries < 0) throw Error(ErrorCode::Config, "max_retries must be >= 0");
  if (!options_.sleep) {
    options_.sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  }
}

std::chrono::milliseconds Gateway::backoff_delay(int retry, std::uint64_t key) const {
  const auto& p = options_.retry;
  const double raw = static_cast<double>(p.base_delay.count()) *
                     std::pow(p.multiplier, static_cast<double>(std::max(0, retry - 1)));
  const double capped = std::min(raw, static_cast<double>(p.max_delay.count()));
  const std::uint64_t h = text::mix64(p.jitter_seed ^ text::mix64(key + static_cast<std::uint64_t>(retry)));
  const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
  return std::chrono::milliseconds(static_cast<long long>(capped * (0.5 + 0.5 * u)));
}

template <typename Call>
auto Gateway::with_retries(const std::string& stage, std::uint64_t key, Call&& call) {
  const int max_attempts = 1 + options_.retry.max_retries;
  StageUsage usage;
  usage.calls = 1;
  const auto started = std::chrono::steady_clock::now();
  auto finish = [&] {
    usage.wall_time = std::chrono::steady_clock::now() - started;
    ledger_.record(stage, usage);
  };

  for (int attempt = 1;; ++attempt) {
    ++usage.attempts;
    try {
      InFlightSlot slot(*this);
      auto result = call(usage);
      finish();
      return result;
    } catch (const ProviderError& e) {
      if (!e.retryable() || attempt >= max_attempts) {
        finish();
        if (e.retryable() && e.status() == 429) {
          throw Error(ErrorCode::RateLimit, "rate limited after " + std::to_string(attempt) +
                                                " attempts: " + e.what());
        }
        if (e.retryable()) {
          throw Error(ErrorCode::Provider, "provider failed after " + std::to_string(attempt) +
                                               " attempts: " + e.what());
        }
        throw;
      }
      const auto delay = backoff_delay(attempt, key);
      {
        std::lock_guard lock(log_mu_);
        retry_log_.push_back(RetryEvent{stage, attempt, e.status(), delay, e.what()});
      }
      options_.sleep(delay);
    } catch (const Error&) {
      finish();
      throw;
    } catch (const std::exception& e) {
      finish();
      throw Error(ErrorCode::Provider, std::string("backend failure: ") + e.what());
    }
  }
}

std::string Gateway::complete(const ChatRequest& request) {
  request.validate();
  const auto key = text::fnv1a64(canonical_json(request).dump());
  return with_retries(request.stage, key, [&](StageUsage& usage) {
    Completion c = backend_->complete(request);
    usage.prompt_tokens += c.prompt_tokens ? c.prompt_tokens : estimate_tokens(request);
    usage.completion_tokens += c.completion_tokens ? c.completion_tokens : estimate_tokens(c.text);
    if (text::trim(c.text).empty()) {
      throw Error(ErrorCode::EmptyCompletion, "provider returned an empty completion");
    }
    return std::move(c.text);
  });
}

BooleanVerdict Gateway::judge(const JudgeQuery& query) {
  if (text::trim(query.question).empty()) throw Error(ErrorCode::Config, "judge question is empty");
  const auto key = text::fnv1a64(canonical_json(query).dump());
  return with_retries(query.stage, key, [&](StageUsage& usage) {
    const BooleanVerdict v = backend_->judge(query);
    usage.prompt_tokens += estimate_tokens(query);
    usage.completion_tokens += 1;
    if (!(v.p_yes >= 0.0 && v.p_yes <= 1.0) || !(v.p_no >= 0.0 && v.p_no <= 1.0)) {
      throw Error(ErrorCode::Provider, "verdict probabilities outside [0, 1]");
    }
    if (v.p_yes == 0.0 && v.p_no == 0.0) {
      throw Error(ErrorCode::Degenerate, "judge returned zero probability for both yes and no");
    }
    return v;
  });
}

BooleanVerdict Gateway::judge(std::string_view context, std::string_view question) {
  JudgeQuery q;
  q.context = std::string(context);
  q.question = std::string(question);
  return judge(q);
}

std::vector<RetryEvent> Gateway::retry_log() const {
  std::lock_guard lock(log_mu_);
  return retry_log_;
}

}  // namespace karabo::llm
