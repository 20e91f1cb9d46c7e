#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace karabo::llm {

enum class Role { User, Assistant };

std::string_view to_string(Role r);
Role role_from_string(std::string_view s);

struct ChatMessage {
  Role role = Role::User;
  std::string text;

  bool operator==(const ChatMessage&) const = default;
};

struct ChatRequest {
  std::string system_prompt;
  std::vector<ChatMessage> messages;
  double temperature = 1.0;
  double top_p = 1.0;
  int max_tokens = 1024;
  double frequency_penalty = 0.0;
  double presence_penalty = 0.0;
  /// Accounting label ("chat", "adapt.ubuntu", ...). Not sent to providers.
  std::string stage = "chat";

  /// Throws E_CONFIG when messages are empty or a parameter is out of range.
  void validate() const;

  /// Text of the last user message, or "" when there is none.
  const std::string& last_user_text() const;
};

/// Boolean question about `response` given `context`. `reference` is the
/// optional reference text, unused by reference-free questions.
struct JudgeQuery {
  std::string context;
  std::string response;
  std::string question;
  std::string reference;
  std::string stage = "judge";
};

/// Token probabilities for "Yes" and "No". They need not sum to one.
struct BooleanVerdict {
  double p_yes = 0.0;
  double p_no = 0.0;

  bool is_yes() const { return p_yes > p_no; }
  bool operator==(const BooleanVerdict&) const = default;
};

struct Completion {
  std::string text;
  std::size_t prompt_tokens = 0;
  std::size_t completion_tokens = 0;
};

/// A text-generation provider. Implementations must be safe to call from
/// several threads at once.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual Completion complete(const ChatRequest& request) = 0;
  virtual BooleanVerdict judge(const JudgeQuery& query) = 0;
};

/// Rough whitespace token count used when a provider reports no usage.
std::size_t estimate_tokens(std::string_view text);
std::size_t estimate_tokens(const ChatRequest& request);
std::size_t estimate_tokens(const JudgeQuery& query);

/// Canonical JSON of the provider-visible part of a request (stage excluded).
nlohmann::json canonical_json(const ChatRequest& request);
nlohmann::json canonical_json(const JudgeQuery& query);

/// SHA-256 of the canonical JSON; the key used by recorded fixtures.
std::string request_hash(const ChatRequest& request);
std::string request_hash(const JudgeQuery& query);

}  // namespace karabo::llm
