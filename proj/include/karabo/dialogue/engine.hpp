#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "karabo/dialogue/conversation.hpp"
#include "karabo/dialogue/greeting.hpp"
#include "karabo/dialogue/persona.hpp"
#include "karabo/dialogue/safety.hpp"
#include "karabo/llm/gateway.hpp"

namespace karabo::dialogue {

/// Deployment generation settings.
struct GenerationParams {
  double temperature = 0.35;
  int max_tokens = 2048;
  double top_p = 1.0;
  double frequency_penalty = 0.0;
  double presence_penalty = 0.0;

  static GenerationParams from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  bool operator==(const GenerationParams&) const = default;
};

struct DialogueConfig {
  PersonaPrompt persona = PersonaPrompt::defaults();
  GenerationParams params;
  GreetingTable greetings = GreetingTable::defaults();
  std::vector<std::string> crisis_lexicon = default_crisis_lexicon();
  std::string safety_notice = default_safety_notice();
  /// Most recent messages sent per request; 0 sends the full history.
  /// Truncation drops the oldest user/assistant pairs.
  std::size_t max_history_messages = 0;

  /// Missing keys keep their defaults.
  static DialogueConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct AssistantReply {
  Message message;
  std::optional<CrisisMatch> flag;
};

class DialogueEngine {
 public:
  using Clock = std::function<text::TimePoint()>;

  /// Renders the system prompt eagerly; throws E_TEMPLATE on a bad persona.
  explicit DialogueEngine(DialogueConfig config, Clock clock = {});

  /// New conversation with a fresh id and the language's greeting.
  /// `warning` is set when the language fell back to the default.
  Conversation start(std::string_view language, std::string* warning = nullptr) const;

  /// Appends the user message, calls the gateway with the system prompt,
  /// history and params, then appends and returns the assistant message.
  /// Throws E_EMPTY_INPUT (conversation untouched) or E_UPSTREAM (user
  /// message kept with an error marker).
  AssistantReply respond(Conversation& conversation, std::string_view user_text,
                         llm::Gateway& gateway) const;
  AssistantReply respond(Conversation& conversation, std::string_view user_text,
                         const GenerationParams& params, llm::Gateway& gateway) const;

  /// The request `respond` would send for the current history.
  llm::ChatRequest build_request(const Conversation& conversation, const GenerationParams& params) const;

  const std::string& system_prompt() const { return system_prompt_; }
  const DialogueConfig& config() const { return config_; }

 private:
  text::TimePoint now(const Conversation& conversation) const;

  DialogueConfig config_;
  Clock clock_;
  std::string system_prompt_;
};

}  // namespace karabo::dialogue
