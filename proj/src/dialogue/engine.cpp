#include "karabo/dialogue/engine.hpp"

#include <algorithm>

#include "karabo/error.hpp"

namespace karabo::dialogue {

GenerationParams GenerationParams::from_json(const nlohmann::json& j) {
  GenerationParams p;
  p.temperature = j.value("temperature", p.temperature);
  p.max_tokens = j.value("max_tokens", p.max_tokens);
  p.top_p = j.value("top_p", p.top_p);
  p.frequency_penalty = j.value("frequency_penalty", p.frequency_penalty);
  p.presence_penalty = j.value("presence_penalty", p.presence_penalty);
  if (p.max_tokens <= 0) throw Error(ErrorCode::Config, "max_tokens must be positive");
  if (p.temperature < 0 || p.temperature > 2) throw Error(ErrorCode::Config, "temperature must be in [0, 2]");
  if (p.top_p <= 0 || p.top_p > 1) throw Error(ErrorCode::Config, "top_p must be in (0, 1]");
  return p;
}

nlohmann::json GenerationParams::to_json() const {
  return {{"temperature", temperature},
          {"max_tokens", max_tokens},
          {"top_p", top_p},
          {"frequency_penalty", frequency_penalty},
          {"presence_penalty", presence_penalty}};
}

DialogueConfig DialogueConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::Schema, "dialogue config must be an object");
  DialogueConfig c;
  if (j.contains("persona")) c.persona = PersonaPrompt::from_json(j.at("persona"));
  if (j.contains("generation")) c.params = GenerationParams::from_json(j.at("generation"));
  if (j.contains("greetings")) c.greetings = GreetingTable::from_json(j.at("greetings"));
  if (j.contains("crisis_lexicon")) c.crisis_lexicon = j.at("crisis_lexicon").get<std::vector<std::string>>();
  if (j.contains("safety_notice")) c.safety_notice = j.at("safety_notice").get<std::string>();
  if (j.contains("max_history_messages")) c.max_history_messages = j.at("max_history_messages").get<std::size_t>();
  return c;
}

nlohmann::json DialogueConfig::to_json() const {
  return {{"persona", persona.to_json()},
          {"generation", params.to_json()},
          {"greetings", greetings.to_json()},
          {"crisis_lexicon", crisis_lexicon},
          {"safety_notice", safety_notice},
          {"max_history_messages", max_history_messages}};
}

DialogueEngine::DialogueEngine(DialogueConfig config, Clock clock)
    : config_(std::move(config)), clock_(std::move(clock)) {
  if (!clock_) clock_ = [] { return std::chrono::system_clock::now(); };
  system_prompt_ = render_system_prompt(config_.persona);
}

text::TimePoint DialogueEngine::now(const Conversation& conversation) const {
  auto t = std::chrono::time_point_cast<std::chrono::milliseconds>(clock_());
  text::TimePoint tp{t};
  tp = std::max(tp, conversation.updated_at);
  if (!conversation.messages.empty()) tp = std::max(tp, conversation.messages.back().timestamp);
  return tp;
}

Conversation DialogueEngine::start(std::string_view language, std::string* warning) const {
  Conversation c;
  c.id = new_conversation_id();
  auto g = config_.greetings.greeting(language);
  c.language_pref = g.language;
  c.greeting = g.text;
  if (g.fallback && warning)
    *warning = "unknown language '" + std::string(language) + "'; using " + g.language;
  c.created_at = now(c);
  c.updated_at = c.created_at;
  return c;
}

llm::ChatRequest DialogueEngine::build_request(const Conversation& conversation,
                                               const GenerationParams& params) const {
  llm::ChatRequest req;
  req.system_prompt = system_prompt_;
  req.temperature = params.temperature;
  req.max_tokens = params.max_tokens;
  req.top_p = params.top_p;
  req.frequency_penalty = params.frequency_penalty;
  req.presence_penalty = params.presence_penalty;
  req.stage = "chat";
  auto history = conversation.answered_history();
  std::size_t begin = 0;
  const auto limit = config_.max_history_messages;
  if (limit > 0) {
    while (history.size() - begin > limit && history.size() - begin > 1) begin += 2;
    begin = std::min(begin, history.size() - 1);
  }
  for (std::size_t i = begin; i < history.size(); ++i)
    req.messages.push_back({history[i]->role, history[i]->text});
  return req;
}

AssistantReply DialogueEngine::respond(Conversation& conversation, std::string_view user_text,
                                       llm::Gateway& gateway) const {
  return respond(conversation, user_text, config_.params, gateway);
}

AssistantReply DialogueEngine::respond(Conversation& conversation, std::string_view user_text,
                                       const GenerationParams& params, llm::Gateway& gateway) const {
  if (text::trim(user_text).empty()) throw Error(ErrorCode::EmptyInput, "message text is empty");

  auto flag = crisis_screen(user_text, config_.crisis_lexicon);
  Message user;
  user.role = llm::Role::User;
  user.text = std::string(user_text);
  user.timestamp = now(conversation);
  conversation.messages.push_back(user);
  conversation.updated_at = user.timestamp;
  const auto user_index = conversation.messages.size() - 1;
  if (flag) conversation.safety_flags.push_back({flag->phrase, user_index, user.timestamp});

  std::string reply;
  try {
    reply = gateway.complete(build_request(conversation, params));
  } catch (const Error& e) {
    conversation.messages[user_index].error = std::string(e.code_name()) + ": " + e.what();
    throw Error(ErrorCode::Upstream, std::string(e.code_name()) + ": " + e.what());
  } catch (const std::exception& e) {
    conversation.messages[user_index].error = std::string("E_PROVIDER: ") + e.what();
    throw Error(ErrorCode::Upstream, e.what());
  }

  AssistantReply out;
  out.flag = flag;
  out.message.role = llm::Role::Assistant;
  out.message.text = std::move(reply);
  out.message.timestamp = now(conversation);
  if (flag) out.message.safety_notice = config_.safety_notice;
  conversation.messages.push_back(out.message);
  conversation.updated_at = out.message.timestamp;
  return out;
}

}  // namespace karabo::dialogue
