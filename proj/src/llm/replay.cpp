#include "karabo/llm/replay.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "karabo/error.hpp"
#include "karabo/text.hpp"

namespace karabo::llm {

using nlohmann::json;

ReplayBackend::ReplayBackend(std::istream& fixtures) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(fixtures, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    try {
      const auto j = json::parse(line);
      const auto hash = j.at("hash").get<std::string>();
      const auto kind = j.at("kind").get<std::string>();
      const auto& response = j.at("response");
      if (kind == "complete") {
        completions_[hash] = response.at("text").get<std::string>();
      } else if (kind == "judge") {
        verdicts_[hash] = BooleanVerdict{response.at("p_yes").get<double>(),
                                         response.at("p_no").get<double>()};
      } else {
        throw Error(ErrorCode::Schema, "unknown fixture kind '" + kind + "'");
      }
    } catch (const json::exception& e) {
      throw Error(ErrorCode::Schema, "fixture line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

std::shared_ptr<ReplayBackend> ReplayBackend::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open fixture file " + path.string());
  return std::make_shared<ReplayBackend>(in);
}

Completion ReplayBackend::complete(const ChatRequest& request) {
  const auto it = completions_.find(request_hash(request));
  if (it == completions_.end()) throw ProviderError(0, false, "no recorded completion for request");
  Completion c;
  c.text = it->second;
  return c;
}

BooleanVerdict ReplayBackend::judge(const JudgeQuery& query) {
  const auto it = verdicts_.find(request_hash(query));
  if (it == verdicts_.end()) throw ProviderError(0, false, "no recorded verdict for query");
  return it->second;
}

Completion RecordingBackend::complete(const ChatRequest& request) {
  Completion c = inner_->complete(request);
  const json line{{"hash", request_hash(request)},
                  {"kind", "complete"},
                  {"request", canonical_json(request)},
                  {"response", {{"text", c.text}}}};
  std::lock_guard lock(mu_);
  out_ << line.dump() << '\n';
  return c;
}

BooleanVerdict RecordingBackend::judge(const JudgeQuery& query) {
  const BooleanVerdict v = inner_->judge(query);
  const json line{{"hash", request_hash(query)},
                  {"kind", "judge"},
                  {"request", canonical_json(query)},
                  {"response", {{"p_yes", v.p_yes}, {"p_no", v.p_no}}}};
  std::lock_guard lock(mu_);
  out_ << line.dump() << '\n';
  return v;
}

}  // namespace karabo::llm
