#pragma once

#include <memory>
#include <string>

#include "karabo/llm/types.hpp"

namespace karabo::llm {

struct OpenAIConfig {
  /// Scheme, host and optional port, e.g. "https://api.openai.com".
  std::string base_url = "https://api.openai.com";
  std::string api_key;
  std::string model = "gpt-4o-mini-2024-07-18";
  /// Model used for yes/no judging; falls back to `model` when empty.
  std::string judge_model;
  int timeout_seconds = 60;
  int top_logprobs = 20;

  /// KARABO_API_BASE, KARABO_API_KEY (or OPENAI_API_KEY), KARABO_MODEL,
  /// KARABO_JUDGE_MODEL.
  static OpenAIConfig from_env();
};

/// Chat-completions wire adapter. Judging asks for a single token with top
/// log-probabilities and pools the "yes"/"no" variants.
class OpenAIBackend : public Backend {
 public:
  explicit OpenAIBackend(OpenAIConfig config);

  Completion complete(const ChatRequest& request) override;
  BooleanVerdict judge(const JudgeQuery& query) override;

  /// Request body for a completion, exposed for wire-format tests.
  nlohmann::json completion_body(const ChatRequest& request) const;
  nlohmann::json judge_body(const JudgeQuery& query) const;

  /// Pools probabilities of first-token candidates matching yes/no,
  /// case-insensitively, with or without a leading space.
  static BooleanVerdict verdict_from_response(const nlohmann::json& response);

 private:
  nlohmann::json post(const nlohmann::json& body);

  OpenAIConfig config_;
};

}  // namespace karabo::llm
