#include "karabo/evaluation/scoring.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <future>
#include <sstream>
#include <thread>

#include "karabo/error.hpp"
#include "karabo/text.hpp"

namespace karabo::evaluation {

std::string_view to_string(Dimension d) {
  switch (d) {
    case Dimension::Naturalness: return "naturalness";
    case Dimension::Understandability: return "understandability";
    case Dimension::Coherence: return "coherence";
  }
  return "naturalness";
}

Dimension dimension_from_string(std::string_view s) {
  const auto k = text::ascii_lower(text::trim(s));
  if (k == "naturalness") return Dimension::Naturalness;
  if (k == "understandability" || k == "understanding") return Dimension::Understandability;
  if (k == "coherence") return Dimension::Coherence;
  throw Error(ErrorCode::Config, "unknown dimension '" + std::string(s) + "'");
}

DimensionQuestions DimensionQuestions::defaults() {
  DimensionQuestions q;
  q.questions_ = {"Does this response sound natural and human-like?",
                  "Is this response clear and easy to understand?",
                  "Is this response logically consistent and contextually relevant to the conversation?"};
  return q;
}

DimensionQuestions DimensionQuestions::from_json(const nlohmann::json& j) {
  DimensionQuestions q;
  std::array<bool, 3> seen{};
  auto put = [&](std::string_view dim, const nlohmann::json& question) {
    const auto d = static_cast<int>(dimension_from_string(dim));
    if (seen[d]) throw Error(ErrorCode::Config, "dimension '" + std::string(dim) + "' configured twice");
    if (!question.is_string() || text::trim(question.get<std::string>()).empty())
      throw Error(ErrorCode::Config, "dimension '" + std::string(dim) + "' needs a question");
    seen[d] = true;
    q.questions_[d] = question.get<std::string>();
  };
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) put(k, v);
  } else if (j.is_array()) {
    for (const auto& item : j) put(item.at("dimension").get<std::string>(), item.at("question"));
  } else {
    throw Error(ErrorCode::Config, "dimension questions must be an object or array");
  }
  for (auto d : kDimensions)
    if (!seen[static_cast<int>(d)])
      throw Error(ErrorCode::Config, "dimension '" + std::string(to_string(d)) + "' has no question");
  return q;
}

nlohmann::json DimensionQuestions::to_json() const {
  nlohmann::json out = nlohmann::json::array();
  for (auto d : kDimensions) out.push_back({{"dimension", to_string(d)}, {"question", question(d)}});
  return out;
}

double score_turn(const llm::BooleanVerdict& v) {
  if (!std::isfinite(v.p_yes) || !std::isfinite(v.p_no) || v.p_yes < 0 || v.p_no < 0)
    throw Error(ErrorCode::Range, "verdict probabilities must be finite and non-negative");
  const double total = v.p_yes + v.p_no;
  if (total <= 0) throw Error(ErrorCode::Degenerate, "both answer probabilities are zero");
  return v.p_yes / total;
}

double score_turn(std::string_view, std::string_view, const llm::BooleanVerdict& verdict) {
  return score_turn(verdict);
}

DimensionScores ConversationReport::column_means(bool exclude_first_turn) const {
  DimensionScores sum{};
  std::size_t n = 0;
  for (int pass = 0; pass < 2 && n == 0; ++pass) {
    const bool skip = exclude_first_turn && pass == 0;
    for (const auto& t : turns) {
      if (skip && t.low_context_flag) continue;
      for (int d = 0; d < 3; ++d) sum[d] += t.scores[d];
      ++n;
    }
  }
  if (n == 0) return sum;
  for (auto& s : sum) s /= static_cast<double>(n);
  return sum;
}

nlohmann::json to_json(const ConversationReport& r) {
  nlohmann::json turns = nlohmann::json::array();
  for (const auto& t : r.turns) {
    nlohmann::json scores;
    for (auto d : kDimensions) scores[std::string(to_string(d))] = t.scores[static_cast<int>(d)];
    turns.push_back({{"turn_index", t.turn_index},
                     {"message_index", t.message_index},
                     {"scores", scores},
                     {"low_context_flag", t.low_context_flag}});
  }
  nlohmann::json means;
  for (auto d : kDimensions) means[std::string(to_string(d))] = r.mean(d);
  nlohmann::json j = {{"conversation_id", r.conversation_id},
                      {"turns", turns},
                      {"means", means},
                      {"expected_turns", r.expected_turns},
                      {"incomplete", r.incomplete}};
  if (r.error) j["error"] = *r.error;
  return j;
}

ConversationReport report_from_json(const nlohmann::json& j) {
  try {
    ConversationReport r;
    r.conversation_id = j.at("conversation_id").get<std::string>();
    for (const auto& t : j.at("turns")) {
      TurnScore ts;
      ts.turn_index = t.at("turn_index").get<std::size_t>();
      ts.message_index = t.value("message_index", ts.turn_index);
      ts.low_context_flag = t.value("low_context_flag", false);
      for (auto d : kDimensions) ts.scores[static_cast<int>(d)] = t.at("scores").at(std::string(to_string(d))).get<double>();
      r.turns.push_back(ts);
    }
    for (auto d : kDimensions) r.means[static_cast<int>(d)] = j.at("means").at(std::string(to_string(d))).get<double>();
    r.expected_turns = j.value("expected_turns", r.turns.size());
    r.incomplete = j.value("incomplete", false);
    if (j.contains("error") && j["error"].is_string()) r.error = j["error"].get<std::string>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Schema, std::string("report: ") + e.what());
  }
}

std::string build_context(const dialogue::Conversation& conversation, std::size_t message_index) {
  std::string out;
  const auto end = std::min(message_index, conversation.messages.size());
  for (std::size_t i = 0; i < end; ++i) {
    const auto& m = conversation.messages[i];
    if (m.error) continue;
    if (!out.empty()) out += '\n';
    out += m.role == llm::Role::User ? "User: " : "Assistant: ";
    out += m.text;
  }
  return out;
}

namespace {

DimensionScores score_dimensions(const std::string& context, const std::string& response,
                                 const DimensionQuestions& questions, llm::Gateway& gateway, bool parallel) {
  auto one = [&](Dimension d) {
    llm::JudgeQuery q;
    q.context = context;
    q.response = response;
    q.question = questions.question(d);
    q.stage = "eval." + std::string(to_string(d));
    return score_turn(gateway.judge(q));
  };
  DimensionScores scores{};
  if (!parallel) {
    for (auto d : kDimensions) scores[static_cast<int>(d)] = one(d);
    return scores;
  }
  std::array<std::future<double>, 3> futures;
  for (auto d : kDimensions) futures[static_cast<int>(d)] = std::async(std::launch::async, one, d);
  std::exception_ptr first;
  for (int d = 0; d < 3; ++d) {
    try {
      scores[d] = futures[d].get();
    } catch (...) {
      if (!first) first = std::current_exception();
    }
  }
  if (first) std::rethrow_exception(first);
  return scores;
}

}  // namespace

ConversationReport evaluate_conversation(const dialogue::Conversation& conversation,
                                         const DimensionQuestions& questions, llm::Gateway& gateway,
                                         const EvaluateOptions& options) {
  ConversationReport report;
  report.conversation_id = conversation.id;
  report.expected_turns = conversation.assistant_turns();
  if (report.expected_turns == 0)
    throw Error(ErrorCode::EmptyInput, "conversation '" + conversation.id + "' has no assistant messages");

  std::size_t turn = 0;
  for (std::size_t i = 0; i < conversation.messages.size(); ++i) {
    const auto& m = conversation.messages[i];
    if (m.role != llm::Role::Assistant) continue;
    TurnScore ts;
    ts.turn_index = turn;
    ts.message_index = i;
    ts.low_context_flag = turn == 0;
    try {
      ts.scores = score_dimensions(build_context(conversation, i), m.text, questions, gateway,
                                   options.parallel_dimensions);
    } catch (const Error& e) {
      report.incomplete = true;
      report.error = std::string(e.code_name()) + ": " + e.what();
      break;
    }
    report.turns.push_back(ts);
    ++turn;
  }
  report.means = report.column_means(false);
  return report;
}

std::vector<ConversationReport> evaluate_all(const std::vector<dialogue::Conversation>& conversations,
                                             const DimensionQuestions& questions, llm::Gateway& gateway,
                                             std::size_t workers, const EvaluateOptions& options) {
  std::vector<ConversationReport> out(conversations.size());
  std::vector<std::exception_ptr> errors(conversations.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < conversations.size(); i = next++) {
      try {
        out[i] = evaluate_conversation(conversations[i], questions, gateway, options);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  workers = std::max<std::size_t>(1, std::min(workers, conversations.size()));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

namespace {

dialogue::Conversation transcript_from_lines(const std::vector<nlohmann::json>& lines, std::string id) {
  dialogue::Conversation c;
  c.id = std::move(id);
  for (const auto& line : lines) {
    dialogue::Message m;
    m.role = llm::role_from_string(line.at("role").get<std::string>());
    m.text = line.at("text").get<std::string>();
    if (line.contains("timestamp")) m.timestamp = text::parse_rfc3339(line["timestamp"].get<std::string>());
    c.messages.push_back(std::move(m));
  }
  if (!c.messages.empty()) {
    c.created_at = c.messages.front().timestamp;
    c.updated_at = c.messages.back().timestamp;
  }
  c.validate();
  return c;
}

}  // namespace

std::vector<dialogue::Conversation> load_conversations(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  const auto content = buf.str();

  std::vector<dialogue::Conversation> out;
  try {
    auto whole = nlohmann::json::parse(content);
    if (whole.is_array()) {
      for (const auto& c : whole) out.push_back(dialogue::conversation_from_json(c));
    } else {
      out.push_back(dialogue::conversation_from_json(whole));
    }
    return out;
  } catch (const nlohmann::json::parse_error&) {
  }

  std::vector<nlohmann::json> lines;
  std::istringstream ls(content);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(ls, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    try {
      lines.push_back(nlohmann::json::parse(line));
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::Schema, path.string() + " line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (lines.empty()) return out;
  try {
    if (lines.front().contains("messages")) {
      for (const auto& c : lines) out.push_back(dialogue::conversation_from_json(c));
    } else {
      out.push_back(transcript_from_lines(lines, path.stem().string()));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Schema, path.string() + ": " + e.what());
  }
  return out;
}

}  // namespace karabo::evaluation
