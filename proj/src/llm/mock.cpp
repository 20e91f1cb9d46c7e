#include "karabo/llm/mock.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "karabo/error.hpp"
#include "karabo/llm/replay.hpp"
#include "karabo/text.hpp"

namespace karabo::llm {

using nlohmann::json;

namespace {

std::uint64_t query_key(const JudgeQuery& q, std::uint64_t seed) {
  std::uint64_t h = text::mix64(seed);
  for (const std::string* part : {&q.context, &q.response, &q.question, &q.reference}) {
    h = text::mix64(h ^ text::fnv1a64(*part));
  }
  return h;
}

Completion echo_completion(const ChatRequest& request) {
  Completion c;
  c.text = "[MOCK]" + request.last_user_text();
  return c;
}

}  // namespace

BooleanVerdict hash_seeded_verdict(const JudgeQuery& query, std::uint64_t seed) {
  const std::uint64_t h = query_key(query, seed);
  const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
  return BooleanVerdict{u, 1.0 - u};
}

Completion EchoBackend::complete(const ChatRequest& request) { return echo_completion(request); }

BooleanVerdict EchoBackend::judge(const JudgeQuery& query) {
  return hash_seeded_verdict(query, seed_);
}

Completion ConstantBackend::complete(const ChatRequest& request) { return echo_completion(request); }

Completion HashSeededBackend::complete(const ChatRequest& request) {
  const auto h = text::mix64(seed_ ^ text::fnv1a64(canonical_json(request).dump()));
  char tag[32];
  std::snprintf(tag, sizeof(tag), "[MOCK:%08x] ", static_cast<unsigned>(h >> 32));
  Completion c;
  c.text = tag + request.last_user_text();
  return c;
}

BooleanVerdict HashSeededBackend::judge(const JudgeQuery& query) {
  return hash_seeded_verdict(query, seed_);
}

// --- FunctionBackend ---------------------------------------------------------

std::shared_ptr<FunctionBackend> FunctionBackend::transform(
    std::function<std::string(const std::string&)> f, JudgeFn judge) {
  return std::make_shared<FunctionBackend>(
      [f = std::move(f)](const ChatRequest& r) { return f(r.last_user_text()); }, std::move(judge));
}

Completion FunctionBackend::complete(const ChatRequest& request) {
  Completion c;
  c.text = complete_ ? complete_(request) : "[MOCK]" + request.last_user_text();
  return c;
}

BooleanVerdict FunctionBackend::judge(const JudgeQuery& query) {
  return judge_ ? judge_(query) : hash_seeded_verdict(query, 0);
}

// --- ScriptBackend -----------------------------------------------------------

ScriptBackend::ScriptBackend(std::vector<CompletionStep> completions,
                             std::vector<VerdictStep> verdicts, bool repeat_last)
    : completions_(std::move(completions)), verdicts_(std::move(verdicts)), repeat_last_(repeat_last) {}

namespace {

ScriptBackend::Failure failure_from_json(const json& j) {
  ScriptBackend::Failure f;
  const auto& e = j.at("error");
  if (e.is_number_integer()) {
    f.status = e.get<int>();
  } else if (e.is_object()) {
    f.status = e.value("status", 500);
    f.message = e.value("message", "");
  }
  if (f.message.empty()) f.message = "scripted failure (HTTP " + std::to_string(f.status) + ")";
  return f;
}

}  // namespace

std::shared_ptr<ScriptBackend> ScriptBackend::from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::Config, "script must be a JSON object");
  std::vector<CompletionStep> completions;
  std::vector<VerdictStep> verdicts;
  try {
    for (const auto& c : j.value("completions", json::array())) {
      if (c.is_string()) {
        completions.emplace_back(c.get<std::string>());
      } else if (c.contains("error")) {
        completions.emplace_back(failure_from_json(c));
      } else {
        completions.emplace_back(c.at("text").get<std::string>());
      }
    }
    for (const auto& v : j.value("verdicts", json::array())) {
      if (v.is_array()) {
        verdicts.emplace_back(BooleanVerdict{v.at(0).get<double>(), v.at(1).get<double>()});
      } else if (v.contains("error")) {
        verdicts.emplace_back(failure_from_json(v));
      } else {
        verdicts.emplace_back(BooleanVerdict{v.at("p_yes").get<double>(), v.at("p_no").get<double>()});
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Config, std::string("bad script: ") + e.what());
  }
  return std::make_shared<ScriptBackend>(std::move(completions), std::move(verdicts),
                                         j.value("repeat_last", true));
}

template <typename T>
const T& ScriptBackend::next(const std::vector<T>& steps, std::size_t& cursor, const char* what) {
  if (steps.empty() || (cursor >= steps.size() && !repeat_last_)) {
    throw ProviderError(0, false, std::string("script has no more ") + what);
  }
  const std::size_t i = std::min(cursor, steps.size() - 1);
  ++cursor;
  return steps[i];
}

Completion ScriptBackend::complete(const ChatRequest&) {
  CompletionStep step;
  {
    std::lock_guard lock(mu_);
    step = next(completions_, completion_cursor_, "completions");
  }
  if (const auto* f = std::get_if<Failure>(&step)) {
    throw ProviderError(f->status, f->status == 429 || f->status >= 500, f->message);
  }
  Completion c;
  c.text = std::get<std::string>(step);
  return c;
}

BooleanVerdict ScriptBackend::judge(const JudgeQuery&) {
  VerdictStep step;
  {
    std::lock_guard lock(mu_);
    step = next(verdicts_, verdict_cursor_, "verdicts");
  }
  if (const auto* f = std::get_if<Failure>(&step)) {
    throw ProviderError(f->status, f->status == 429 || f->status >= 500, f->message);
  }
  return std::get<BooleanVerdict>(step);
}

std::size_t ScriptBackend::completions_served() const {
  std::lock_guard lock(mu_);
  return completion_cursor_;
}

std::size_t ScriptBackend::verdicts_served() const {
  std::lock_guard lock(mu_);
  return verdict_cursor_;
}

// --- RoutedBackend -----------------------------------------------------------

RoutedBackend& RoutedBackend::route(std::string stage_prefix, std::shared_ptr<Backend> backend) {
  routes_.emplace_back(std::move(stage_prefix), std::move(backend));
  return *this;
}

Backend& RoutedBackend::resolve(const std::string& stage) const {
  const Backend* best = fallback_.get();
  std::size_t best_len = 0;
  bool found = false;
  for (const auto& [prefix, backend] : routes_) {
    if (stage.compare(0, prefix.size(), prefix) == 0 && (!found || prefix.size() > best_len)) {
      best = backend.get();
      best_len = prefix.size();
      found = true;
    }
  }
  if (!best) throw Error(ErrorCode::Config, "no backend routed for stage '" + stage + "'");
  return const_cast<Backend&>(*best);
}

Completion RoutedBackend::complete(const ChatRequest& request) {
  return resolve(request.stage).complete(request);
}

BooleanVerdict RoutedBackend::judge(const JudgeQuery& query) { return resolve(query.stage).judge(query); }

// --- CapturingBackend --------------------------------------------------------

Completion CapturingBackend::complete(const ChatRequest& request) {
  {
    std::lock_guard lock(mu_);
    requests_.push_back(request);
  }
  return inner_->complete(request);
}

BooleanVerdict CapturingBackend::judge(const JudgeQuery& query) {
  {
    std::lock_guard lock(mu_);
    queries_.push_back(query);
  }
  return inner_->judge(query);
}

std::vector<ChatRequest> CapturingBackend::requests() const {
  std::lock_guard lock(mu_);
  return requests_;
}

std::vector<JudgeQuery> CapturingBackend::queries() const {
  std::lock_guard lock(mu_);
  return queries_;
}

void CapturingBackend::clear() {
  std::lock_guard lock(mu_);
  requests_.clear();
  queries_.clear();
}

// --- profile parsing ---------------------------------------------------------

namespace {

double parse_probability(const std::string& s, const std::string& profile) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::Config, "bad probability in mock profile '" + profile + "'");
  }
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::Config, path + ": " + e.what());
  }
}

}  // namespace

std::shared_ptr<Backend> make_mock_backend(const std::string& profile, std::uint64_t seed) {
  const auto colon = profile.find(':');
  const std::string kind = text::ascii_lower(profile.substr(0, colon));
  const std::string arg = colon == std::string::npos ? "" : profile.substr(colon + 1);

  if (kind == "echo") return std::make_shared<EchoBackend>(seed);
  if (kind == "identity") {
    return FunctionBackend::transform([](const std::string& s) { return s; },
                                      [seed](const JudgeQuery& q) { return hash_seeded_verdict(q, seed); });
  }
  if (kind == "lower") {
    return FunctionBackend::transform([](const std::string& s) { return text::ascii_lower(s); },
                                      [seed](const JudgeQuery& q) { return hash_seeded_verdict(q, seed); });
  }
  if (kind == "append") {
    return FunctionBackend::transform([arg](const std::string& s) { return s + arg; },
                                      [seed](const JudgeQuery& q) { return hash_seeded_verdict(q, seed); });
  }
  if (kind == "yes") return std::make_shared<ConstantBackend>(1.0, 0.0);
  if (kind == "no") return std::make_shared<ConstantBackend>(0.0, 1.0);
  if (kind == "constant") {
    const auto comma = arg.find(',');
    if (comma == std::string::npos) {
      throw Error(ErrorCode::Config, "constant profile needs P_YES,P_NO: '" + profile + "'");
    }
    return std::make_shared<ConstantBackend>(parse_probability(arg.substr(0, comma), profile),
                                             parse_probability(arg.substr(comma + 1), profile));
  }
  if (kind == "hash") {
    std::uint64_t s = seed;
    if (!arg.empty()) {
      try {
        s = std::stoull(arg);
      } catch (const std::exception&) {
        throw Error(ErrorCode::Config, "bad seed in mock profile '" + profile + "'");
      }
    }
    return std::make_shared<HashSeededBackend>(s);
  }
  if (kind == "script") {
    if (arg.empty()) throw Error(ErrorCode::Config, "script profile needs a path");
    return ScriptBackend::from_json(read_json_file(arg));
  }
  if (kind == "replay") {
    if (arg.empty()) throw Error(ErrorCode::Config, "replay profile needs a path");
    return ReplayBackend::from_file(arg);
  }
  throw Error(ErrorCode::Config, "unknown mock profile '" + profile + "'");
}

std::shared_ptr<Backend> make_routed_mock(const std::vector<std::string>& specs, std::uint64_t seed) {
  std::shared_ptr<Backend> fallback;
  std::vector<std::pair<std::string, std::shared_ptr<Backend>>> routes;
  for (const auto& spec : specs) {
    const auto eq = spec.find('=');
    const auto colon = spec.find(':');
    if (eq != std::string::npos && (colon == std::string::npos || eq < colon)) {
      routes.emplace_back(spec.substr(0, eq), make_mock_backend(spec.substr(eq + 1), seed));
    } else {
      fallback = make_mock_backend(spec, seed);
    }
  }
  if (!fallback) fallback = std::make_shared<EchoBackend>(seed);
  if (routes.empty()) return fallback;
  auto routed = std::make_shared<RoutedBackend>(fallback);
  for (auto& [prefix, backend] : routes) routed->route(prefix, backend);
  return routed;
}

}  // namespace karabo::llm
