#pragma once

// Offline backends. Every test and CLI run with --mock goes through these.

#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "karabo/llm/types.hpp"

namespace karabo::llm {

/// Stable pseudo-probability pair from a keyed hash of the query: (u, 1-u).
BooleanVerdict hash_seeded_verdict(const JudgeQuery& query, std::uint64_t seed);

/// complete: "[MOCK]" + last user text. judge: hash-seeded.
class EchoBackend : public Backend {
 public:
  explicit EchoBackend(std::uint64_t seed = 0) : seed_(seed) {}
  Completion complete(const ChatRequest& request) override;
  BooleanVerdict judge(const JudgeQuery& query) override;

 private:
  std::uint64_t seed_;
};

/// complete: echo. judge: always the configured pair.
class ConstantBackend : public Backend {
 public:
  ConstantBackend(double p_yes, double p_no) : verdict_{p_yes, p_no} {}
  Completion complete(const ChatRequest& request) override;
  BooleanVerdict judge(const JudgeQuery&) override { return verdict_; }

 private:
  BooleanVerdict verdict_;
};

/// complete: "[MOCK:xxxxxxxx] " + last user text, the tag keyed on the
/// request and seed. judge: hash-seeded.
class HashSeededBackend : public Backend {
 public:
  explicit HashSeededBackend(std::uint64_t seed) : seed_(seed) {}
  Completion complete(const ChatRequest& request) override;
  BooleanVerdict judge(const JudgeQuery& query) override;

 private:
  std::uint64_t seed_;
};

/// complete: f(last user text). judge: g(query), or hash-seeded when unset.
class FunctionBackend : public Backend {
 public:
  using CompleteFn = std::function<std::string(const ChatRequest&)>;
  using JudgeFn = std::function<BooleanVerdict(const JudgeQuery&)>;

  FunctionBackend(CompleteFn complete, JudgeFn judge)
      : complete_(std::move(complete)), judge_(std::move(judge)) {}

  /// Applies `f` to the last user message.
  static std::shared_ptr<FunctionBackend> transform(std::function<std::string(const std::string&)> f,
                                                    JudgeFn judge = {});

  Completion complete(const ChatRequest& request) override;
  BooleanVerdict judge(const JudgeQuery& query) override;

 private:
  CompleteFn complete_;
  JudgeFn judge_;
};

/// Ordered canned responses. Completions and verdicts are consumed from
/// separate queues; an entry may instead be a provider failure.
class ScriptBackend : public Backend {
 public:
  struct Failure {
    int status = 500;
    std::string message;
  };
  using CompletionStep = std::variant<std::string, Failure>;
  using VerdictStep = std::variant<BooleanVerdict, Failure>;

  ScriptBackend(std::vector<CompletionStep> completions, std::vector<VerdictStep> verdicts,
                bool repeat_last = true);

  /// {"completions": [...], "verdicts": [...], "repeat_last": bool}. A
  /// completion is a string or {"text"}; a verdict is [p_yes, p_no] or
  /// {"p_yes", "p_no"}; either may be {"error": status}.
  static std::shared_ptr<ScriptBackend> from_json(const nlohmann::json& j);

  Completion complete(const ChatRequest& request) override;
  BooleanVerdict judge(const JudgeQuery& query) override;

  std::size_t completions_served() const;
  std::size_t verdicts_served() const;

 private:
  template <typename T>
  const T& next(const std::vector<T>& steps, std::size_t& cursor, const char* what);

  std::vector<CompletionStep> completions_;
  std::vector<VerdictStep> verdicts_;
  bool repeat_last_;
  mutable std::mutex mu_;
  std::size_t completion_cursor_ = 0;
  std::size_t verdict_cursor_ = 0;
};

/// Dispatches on the request's stage label: the longest matching prefix
/// wins, otherwise the fallback is used.
class RoutedBackend : public Backend {
 public:
  explicit RoutedBackend(std::shared_ptr<Backend> fallback) : fallback_(std::move(fallback)) {}

  RoutedBackend& route(std::string stage_prefix, std::shared_ptr<Backend> backend);

  Completion complete(const ChatRequest& request) override;
  BooleanVerdict judge(const JudgeQuery& query) override;

  Backend& resolve(const std::string& stage) const;

 private:
  std::shared_ptr<Backend> fallback_;
  std::vector<std::pair<std::string, std::shared_ptr<Backend>>> routes_;
};

/// Records every request and query, then forwards to `inner`.
class CapturingBackend : public Backend {
 public:
  explicit CapturingBackend(std::shared_ptr<Backend> inner) : inner_(std::move(inner)) {}

  Completion complete(const ChatRequest& request) override;
  BooleanVerdict judge(const JudgeQuery& query) override;

  std::vector<ChatRequest> requests() const;
  std::vector<JudgeQuery> queries() const;
  void clear();

 private:
  std::shared_ptr<Backend> inner_;
  mutable std::mutex mu_;
  std::vector<ChatRequest> requests_;
  std::vector<JudgeQuery> queries_;
};

/// Builds a backend from a profile string:
///   echo | identity | yes | no | lower | constant:P_YES,P_NO | hash[:SEED]
///   append:SUFFIX | script:PATH | replay:PATH
/// `seed` is used by profiles that need one and were given none.
std::shared_ptr<Backend> make_mock_backend(const std::string& profile, std::uint64_t seed = 0);

/// Builds a routed backend from specs of the form "profile" (the fallback)
/// or "stage-prefix=profile". The fallback defaults to echo.
std::shared_ptr<Backend> make_routed_mock(const std::vector<std::string>& specs,
                                          std::uint64_t seed = 0);

}  // namespace karabo::llm
