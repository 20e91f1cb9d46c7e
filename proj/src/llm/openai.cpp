#include "karabo/llm/openai.hpp"

#include <cmath>
#include <cstdlib>
#include <utility>
#include <vector>

#include <httplib.h>

#include "karabo/error.hpp"
#include "karabo/text.hpp"

namespace karabo::llm {

using nlohmann::json;

namespace {

std::string env_or(const char* name, const std::string& fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

Endpoint split_endpoint(const std::string& base_url) {
  const auto scheme = base_url.find("://");
  const auto path_start = base_url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
  Endpoint e;
  e.origin = base_url.substr(0, path_start);
  std::string prefix = path_start == std::string::npos ? "" : base_url.substr(path_start);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  if (prefix.size() >= 3 && prefix.compare(prefix.size() - 3, 3, "/v1") == 0) {
    e.path = prefix + "/chat/completions";
  } else {
    e.path = prefix + "/v1/chat/completions";
  }
  return e;
}

constexpr const char* kJudgeSystemPrompt =
    "You evaluate responses in a conversation. Answer the question with a single word: Yes or No.";

}  // namespace

OpenAIConfig OpenAIConfig::from_env() {
  OpenAIConfig c;
  c.base_url = env_or("KARABO_API_BASE", c.base_url);
  c.api_key = env_or("KARABO_API_KEY", env_or("OPENAI_API_KEY", ""));
  c.model = env_or("KARABO_MODEL", c.model);
  c.judge_model = env_or("KARABO_JUDGE_MODEL", c.judge_model);
  return c;
}

OpenAIBackend::OpenAIBackend(OpenAIConfig config) : config_(std::move(config)) {
  if (config_.base_url.empty()) throw Error(ErrorCode::Config, "provider base URL is empty");
  if (config_.model.empty()) throw Error(ErrorCode::Config, "provider model is empty");
}

json OpenAIBackend::completion_body(const ChatRequest& r) const {
  json messages = json::array();
  if (!r.system_prompt.empty()) messages.push_back({{"role", "system"}, {"content", r.system_prompt}});
  for (const auto& m : r.messages) messages.push_back({{"role", to_string(m.role)}, {"content", m.text}});
  return json{{"model", config_.model},
              {"messages", std::move(messages)},
              {"temperature", r.temperature},
              {"top_p", r.top_p},
              {"max_tokens", r.max_tokens},
              {"frequency_penalty", r.frequency_penalty},
              {"presence_penalty", r.presence_penalty}};
}

json OpenAIBackend::judge_body(const JudgeQuery& q) const {
  std::string user;
  if (!q.context.empty()) user += "Conversation so far:\n" + q.context + "\n\n";
  user += "Response:\n" + q.response + "\n\n";
  if (!q.reference.empty()) user += "Reference:\n" + q.reference + "\n\n";
  user += "Question: " + q.question + "\nAnswer Yes or No.";
  return json{{"model", config_.judge_model.empty() ? config_.model : config_.judge_model},
              {"messages",
               json::array({{{"role", "system"}, {"content", kJudgeSystemPrompt}},
                            {{"role", "user"}, {"content", user}}})},
              {"temperature", 0.0},
              {"max_tokens", 1},
              {"logprobs", true},
              {"top_logprobs", config_.top_logprobs}};
}

json OpenAIBackend::post(const json& body) {
  const auto ep = split_endpoint(config_.base_url);
  httplib::Client client(ep.origin);
  client.set_connection_timeout(config_.timeout_seconds, 0);
  client.set_read_timeout(config_.timeout_seconds, 0);
  client.set_write_timeout(config_.timeout_seconds, 0);
  httplib::Headers headers;
  if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);

  const auto res = client.Post(ep.path, headers, body.dump(), "application/json");
  if (!res) {
    throw ProviderError(0, true, "transport error: " + httplib::to_string(res.error()));
  }
  if (res->status == 429 || res->status >= 500) {
    throw ProviderError(res->status, true, "HTTP " + std::to_string(res->status) + ": " + res->body);
  }
  if (res->status < 200 || res->status >= 300) {
    throw ProviderError(res->status, false, "HTTP " + std::to_string(res->status) + ": " + res->body);
  }
  try {
    return json::parse(res->body);
  } catch (const json::parse_error& e) {
    throw ProviderError(res->status, false, std::string("unparseable provider response: ") + e.what());
  }
}

Completion OpenAIBackend::complete(const ChatRequest& request) {
  const json response = post(completion_body(request));
  Completion c;
  try {
    const auto& content = response.at("choices").at(0).at("message").at("content");
    c.text = content.is_string() ? content.get<std::string>() : std::string();
    if (auto u = response.find("usage"); u != response.end() && u->is_object()) {
      c.prompt_tokens = u->value("prompt_tokens", 0u);
      c.completion_tokens = u->value("completion_tokens", 0u);
    }
  } catch (const json::exception& e) {
    throw ProviderError(200, false, std::string("unexpected completion shape: ") + e.what());
  }
  return c;
}

BooleanVerdict OpenAIBackend::verdict_from_response(const json& response) {
  std::vector<std::pair<std::string, double>> candidates;
  try {
    const auto& first = response.at("choices").at(0).at("logprobs").at("content").at(0);
    const auto top = first.find("top_logprobs");
    if (top != first.end() && top->is_array() && !top->empty()) {
      for (const auto& c : *top) {
        candidates.emplace_back(c.at("token").get<std::string>(), c.at("logprob").get<double>());
      }
    } else {
      // Only the sampled token is available.
      candidates.emplace_back(first.at("token").get<std::string>(), first.at("logprob").get<double>());
    }
  } catch (const json::exception& e) {
    throw ProviderError(200, false, std::string("response carries no log-probabilities: ") + e.what());
  }
  BooleanVerdict v;
  for (const auto& [token, logprob] : candidates) {
    const auto t = text::ascii_lower(text::trim(token));
    if (t == "yes") v.p_yes += std::exp(logprob);
    if (t == "no") v.p_no += std::exp(logprob);
  }
  v.p_yes = std::min(v.p_yes, 1.0);
  v.p_no = std::min(v.p_no, 1.0);
  return v;
}

BooleanVerdict OpenAIBackend::judge(const JudgeQuery& query) {
  return verdict_from_response(post(judge_body(query)));
}

}  // namespace karabo::llm
