#include "karabo/llm/types.hpp"

#include <cmath>

#include "karabo/error.hpp"
#include "karabo/text.hpp"

namespace karabo::llm {

using nlohmann::json;

std::string_view to_string(Role r) { return r == Role::User ? "user" : "assistant"; }

Role role_from_string(std::string_view s) {
  if (s == "user") return Role::User;
  if (s == "assistant") return Role::Assistant;
  throw Error(ErrorCode::Schema, "unknown role '" + std::string(s) + "'");
}

void ChatRequest::validate() const {
  if (messages.empty()) throw Error(ErrorCode::Config, "chat request has no messages");
  if (!(temperature >= 0.0) || !std::isfinite(temperature)) {
    throw Error(ErrorCode::Config, "temperature must be >= 0");
  }
  if (!(top_p > 0.0 && top_p <= 1.0)) throw Error(ErrorCode::Config, "top_p must be in (0, 1]");
  if (max_tokens <= 0) throw Error(ErrorCode::Config, "max_tokens must be positive");
  if (!std::isfinite(frequency_penalty) || !std::isfinite(presence_penalty)) {
    throw Error(ErrorCode::Config, "penalties must be finite");
  }
}

const std::string& ChatRequest::last_user_text() const {
  static const std::string kEmpty;
  for (auto it = messages.rbegin(); it != messages.rend(); ++it) {
    if (it->role == Role::User) return it->text;
  }
  return kEmpty;
}

std::size_t estimate_tokens(std::string_view s) {
  std::size_t n = 0;
  bool in_word = false;
  for (char c : s) {
    const bool ws = c == ' ' || c == '\n' || c == '\t' || c == '\r';
    if (!ws && !in_word) ++n;
    in_word = !ws;
  }
  return n;
}

std::size_t estimate_tokens(const ChatRequest& r) {
  std::size_t n = estimate_tokens(r.system_prompt);
  for (const auto& m : r.messages) n += estimate_tokens(m.text);
  return n;
}

std::size_t estimate_tokens(const JudgeQuery& q) {
  return estimate_tokens(q.context) + estimate_tokens(q.response) + estimate_tokens(q.question) +
         estimate_tokens(q.reference);
}

json canonical_json(const ChatRequest& r) {
  json messages = json::array();
  for (const auto& m : r.messages) messages.push_back({{"role", to_string(m.role)}, {"text", m.text}});
  return json{{"kind", "complete"},
              {"system_prompt", r.system_prompt},
              {"messages", std::move(messages)},
              {"temperature", r.temperature},
              {"top_p", r.top_p},
              {"max_tokens", r.max_tokens},
              {"frequency_penalty", r.frequency_penalty},
              {"presence_penalty", r.presence_penalty}};
}

json canonical_json(const JudgeQuery& q) {
  return json{{"kind", "judge"},
              {"context", q.context},
              {"response", q.response},
              {"question", q.question},
              {"reference", q.reference}};
}

std::string request_hash(const ChatRequest& r) { return text::sha256_hex(canonical_json(r).dump()); }
std::string request_hash(const JudgeQuery& q) { return text::sha256_hex(canonical_json(q).dump()); }

}  // namespace karabo::llm
