#include "karabo/dialogue/conversation.hpp"

#include <openssl/rand.h>

#include <array>
#include <cstdio>

#include "karabo/error.hpp"

namespace karabo::dialogue {

std::vector<const Message*> Conversation::answered_history() const {
  std::vector<const Message*> out;
  for (const auto& m : messages)
    if (!m.error) out.push_back(&m);
  return out;
}

std::size_t Conversation::assistant_turns() const {
  std::size_t n = 0;
  for (const auto& m : messages) n += m.role == llm::Role::Assistant;
  return n;
}

void Conversation::validate() const {
  if (id.empty()) throw Error(ErrorCode::Schema, "conversation has no id");
  if (updated_at < created_at) throw Error(ErrorCode::Schema, "conversation updated before it was created");
  auto expected = llm::Role::User;
  auto last = created_at;
  for (std::size_t i = 0; i < messages.size(); ++i) {
    const auto& m = messages[i];
    if (m.timestamp < last)
      throw Error(ErrorCode::Schema, "message " + std::to_string(i) + " goes back in time");
    last = m.timestamp;
    if (m.error) {
      if (m.role != llm::Role::User)
        throw Error(ErrorCode::Schema, "message " + std::to_string(i) + ": only user messages carry errors");
      if (expected != llm::Role::User)
        throw Error(ErrorCode::Schema, "message " + std::to_string(i) + " breaks role alternation");
      continue;
    }
    if (m.role != expected)
      throw Error(ErrorCode::Schema, "message " + std::to_string(i) + " breaks role alternation");
    expected = expected == llm::Role::User ? llm::Role::Assistant : llm::Role::User;
  }
  if (last > updated_at) throw Error(ErrorCode::Schema, "message newer than conversation update time");
  for (const auto& f : safety_flags) {
    if (f.message_index >= messages.size())
      throw Error(ErrorCode::Schema, "safety flag points past the last message");
  }
}

std::string new_conversation_id() {
  std::array<unsigned char, 16> bytes{};
  if (RAND_bytes(bytes.data(), static_cast<int>(bytes.size())) != 1)
    throw Error(ErrorCode::Io, "random source unavailable");
  std::string out;
  out.reserve(32);
  char buf[3];
  for (auto b : bytes) {
    std::snprintf(buf, sizeof buf, "%02x", b);
    out += buf;
  }
  return out;
}

nlohmann::json to_json(const Message& m) {
  nlohmann::json j = {{"role", llm::to_string(m.role)},
                      {"text", m.text},
                      {"timestamp", text::format_rfc3339(m.timestamp)}};
  if (m.safety_notice) j["safety_notice"] = *m.safety_notice;
  if (m.error) j["error"] = *m.error;
  return j;
}

Message message_from_json(const nlohmann::json& j) {
  try {
    Message m;
    m.role = llm::role_from_string(j.at("role").get<std::string>());
    m.text = j.at("text").get<std::string>();
    m.timestamp = text::parse_rfc3339(j.at("timestamp").get<std::string>());
    if (j.contains("safety_notice") && !j["safety_notice"].is_null())
      m.safety_notice = j["safety_notice"].get<std::string>();
    if (j.contains("error") && !j["error"].is_null()) m.error = j["error"].get<std::string>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Schema, std::string("message: ") + e.what());
  }
}

nlohmann::json to_json(const Conversation& c) {
  nlohmann::json messages = nlohmann::json::array();
  for (const auto& m : c.messages) messages.push_back(to_json(m));
  nlohmann::json flags = nlohmann::json::array();
  for (const auto& f : c.safety_flags)
    flags.push_back({{"phrase", f.phrase}, {"message_index", f.message_index}, {"at", text::format_rfc3339(f.at)}});
  return {{"id", c.id},
          {"language_pref", c.language_pref},
          {"greeting", c.greeting},
          {"created_at", text::format_rfc3339(c.created_at)},
          {"updated_at", text::format_rfc3339(c.updated_at)},
          {"messages", messages},
          {"safety_flags", flags}};
}

Conversation conversation_from_json(const nlohmann::json& j) {
  try {
    Conversation c;
    c.id = j.at("id").get<std::string>();
    c.language_pref = j.value("language_pref", "");
    c.greeting = j.value("greeting", "");
    c.created_at = text::parse_rfc3339(j.at("created_at").get<std::string>());
    c.updated_at = text::parse_rfc3339(j.at("updated_at").get<std::string>());
    for (const auto& m : j.at("messages")) c.messages.push_back(message_from_json(m));
    if (j.contains("safety_flags")) {
      for (const auto& f : j.at("safety_flags")) {
        c.safety_flags.push_back({f.at("phrase").get<std::string>(), f.at("message_index").get<std::size_t>(),
                                  text::parse_rfc3339(f.at("at").get<std::string>())});
      }
    }
    c.validate();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Schema, std::string("conversation: ") + e.what());
  }
}

}  // namespace karabo::dialogue
