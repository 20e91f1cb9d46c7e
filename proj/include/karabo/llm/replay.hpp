#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "karabo/llm/types.hpp"

namespace karabo::llm {

/// Answers from recorded fixtures: JSONL lines of
///   {"hash": <request_hash>, "kind": "complete"|"judge", "response": {...}}
/// where a completion response is {"text"} and a verdict {"p_yes","p_no"}.
/// Unknown requests fail with a non-retryable E_PROVIDER.
class ReplayBackend : public Backend {
 public:
  explicit ReplayBackend(std::istream& fixtures);
  static std::shared_ptr<ReplayBackend> from_file(const std::filesystem::path& path);

  Completion complete(const ChatRequest& request) override;
  BooleanVerdict judge(const JudgeQuery& query) override;

  std::size_t size() const { return completions_.size() + verdicts_.size(); }

 private:
  std::map<std::string, std::string> completions_;
  std::map<std::string, BooleanVerdict> verdicts_;
};

/// Forwards to `inner` and appends each exchange to `out` in the
/// ReplayBackend fixture format.
class RecordingBackend : public Backend {
 public:
  RecordingBackend(std::shared_ptr<Backend> inner, std::ostream& out)
      : inner_(std::move(inner)), out_(out) {}

  Completion complete(const ChatRequest& request) override;
  BooleanVerdict judge(const JudgeQuery& query) override;

 private:
  std::shared_ptr<Backend> inner_;
  std::mutex mu_;
  std::ostream& out_;
};

}  // namespace karabo::llm
