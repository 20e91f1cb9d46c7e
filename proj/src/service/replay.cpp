#include "karabo/service/replay.hpp"

#include "karabo/error.hpp"

namespace karabo::service {

LinguisticChecks run_linguistic_checks(const std::string& text, const adaptation::ProverbRegistry& registry,
                                       const std::vector<std::string>& clinical_lexicon) {
  LinguisticChecks c;
  c.clinical_terms = evaluation::detect_clinical_terms(text, clinical_lexicon);
  c.scripture = evaluation::detect_scripture(text);
  c.proverbs = evaluation::detect_proverb(text, registry);
  c.simplicity = evaluation::simplicity_metrics(text);
  return c;
}

ReplayResult replay_cases(const std::vector<CaseStudyFixture>& fixtures, const dialogue::DialogueEngine& engine,
                          llm::Gateway& gateway, const ReplayOptions& options) {
  ReplayResult result;
  std::vector<evaluation::ConversationReport> reports;
  for (const auto& f : fixtures) {
    CaseReplay cr;
    cr.case_id = f.case_id;
    try {
      auto conv = engine.start(options.language);
      conv.id = "case-" + std::to_string(f.case_id);
      cr.conversation_id = conv.id;
      auto reply = engine.respond(conv, f.narrative, gateway);
      cr.assistant_text = reply.message.text;
      cr.checks = run_linguistic_checks(cr.assistant_text, options.registry, options.clinical_lexicon);
      auto report = evaluation::evaluate_conversation(conv, options.questions, gateway);
      report.conversation_id = std::to_string(f.case_id);
      if (report.incomplete) cr.error = report.error;
      cr.report = report;
      if (!report.turns.empty()) reports.push_back(std::move(report));
    } catch (const Error& e) {
      cr.error = std::string(e.code_name()) + ": " + e.what();
    }
    result.cases.push_back(std::move(cr));
  }
  result.table = evaluation::aggregate(reports);
  return result;
}

nlohmann::json ReplayResult::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : cases) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& t : c.checks.clinical_terms) terms.push_back(evaluation::to_json(t));
    nlohmann::json refs = nlohmann::json::array();
    for (const auto& r : c.checks.scripture) refs.push_back(evaluation::to_json(r));
    nlohmann::json j = {{"case_id", c.case_id},
                        {"conversation_id", c.conversation_id},
                        {"assistant_text", c.assistant_text},
                        {"checks",
                         {{"clinical_terms", terms},
                          {"scripture", refs},
                          {"proverbs", c.checks.proverbs},
                          {"simplicity", evaluation::to_json(c.checks.simplicity)}}}};
    j["report"] = c.report ? evaluation::to_json(*c.report) : nlohmann::json(nullptr);
    if (c.error) j["error"] = *c.error;
    arr.push_back(std::move(j));
  }
  return {{"cases", arr}, {"table", table.to_json()}};
}

}  // namespace karabo::service
