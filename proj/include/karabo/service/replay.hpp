#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "karabo/adaptation/registry.hpp"
#include "karabo/dialogue/engine.hpp"
#include "karabo/evaluation/aggregate.hpp"
#include "karabo/evaluation/detectors.hpp"
#include "karabo/evaluation/scoring.hpp"
#include "karabo/service/fixtures.hpp"

namespace karabo::service {

struct LinguisticChecks {
  std::vector<evaluation::TermMatch> clinical_terms;
  std::vector<evaluation::ScriptureRef> scripture;
  std::vector<std::size_t> proverbs;
  evaluation::SimplicityMetrics simplicity;
};

LinguisticChecks run_linguistic_checks(const std::string& text, const adaptation::ProverbRegistry& registry,
                                       const std::vector<std::string>& clinical_lexicon);

struct CaseReplay {
  int case_id = 0;
  std::string conversation_id;
  std::string assistant_text;
  std::optional<evaluation::ConversationReport> report;
  LinguisticChecks checks;
  std::optional<std::string> error;
};

struct ReplayResult {
  std::vector<CaseReplay> cases;
  /// One row per case that produced a report, labeled by case id.
  evaluation::AggregateTable table;

  nlohmann::json to_json() const;
};

struct ReplayOptions {
  evaluation::DimensionQuestions questions = evaluation::DimensionQuestions::defaults();
  adaptation::ProverbRegistry registry = adaptation::ProverbRegistry::placeholder();
  std::vector<std::string> clinical_lexicon = evaluation::default_clinical_lexicon();
  std::string language = "english";
};

/// Sends each narrative as the opening user message, scores the reply and
/// runs the linguistic checks. A failing case is recorded and skipped.
ReplayResult replay_cases(const std::vector<CaseStudyFixture>& fixtures, const dialogue::DialogueEngine& engine,
                          llm::Gateway& gateway, const ReplayOptions& options = {});

}  // namespace karabo::service
