#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "karabo/llm/types.hpp"
#include "karabo/text.hpp"

namespace karabo::dialogue {

struct SafetyFlag {
  std::string phrase;
  std::size_t message_index = 0;
  text::TimePoint at{};

  bool operator==(const SafetyFlag&) const = default;
};

struct Message {
  llm::Role role = llm::Role::User;
  std::string text;
  text::TimePoint timestamp{};
  /// Help-resources notice shown above an assistant reply.
  std::optional<std::string> safety_notice;
  /// Set on a user message whose reply failed upstream.
  std::optional<std::string> error;

  bool operator==(const Message&) const = default;
};

struct Conversation {
  std::string id;
  std::string language_pref;
  std::string greeting;
  text::TimePoint created_at{};
  text::TimePoint updated_at{};
  std::vector<Message> messages;
  std::vector<SafetyFlag> safety_flags;

  /// Messages without an error marker; what the provider sees.
  std::vector<const Message*> answered_history() const;

  std::size_t assistant_turns() const;

  /// Throws E_SCHEMA unless, ignoring errored user messages, roles
  /// alternate starting with the user, and timestamps never decrease.
  void validate() const;

  bool operator==(const Conversation&) const = default;
};

/// 128-bit random hex token.
std::string new_conversation_id();

nlohmann::json to_json(const Message& m);
Message message_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Conversation& c);
Conversation conversation_from_json(const nlohmann::json& j);

}  // namespace karabo::dialogue
