#pragma once

#include "karabo/adaptation/config.hpp"
#include "karabo/adaptation/random.hpp"
#include "karabo/adaptation/registry.hpp"
#include "karabo/adaptation/trace.hpp"
#include "karabo/corpus/corpus.hpp"
#include "karabo/llm/gateway.hpp"

namespace karabo::adaptation {

struct StageResult {
  corpus::TurnInstance instance;
  StageEntry entry;
};

/// Stage labels used on gateway requests, for routing and accounting.
namespace stage_labels {
inline constexpr const char* kUbuntu = "adapt.ubuntu";
inline constexpr const char* kSimplify = "adapt.simplify";
inline constexpr const char* kDeclinical = "adapt.declinical";
inline constexpr const char* kFaithBenefit = "adapt.faith.benefit";
inline constexpr const char* kFaithIntegrate = "adapt.faith.integrate";
inline constexpr const char* kProverbBenefit = "adapt.proverb.benefit";
inline constexpr const char* kProverbSuitability = "adapt.proverb.suitability";
inline constexpr const char* kProverbIntegrate = "adapt.proverb.integrate";
}  // namespace stage_labels

/// "Client: ...\nCounselor: ..." as shown to judges.
std::string instance_transcript(const corpus::TurnInstance& instance);

/// The system prompt a rewrite stage sends for `instance`.
std::string render_stage_prompt(Stage stage, const corpus::TurnInstance& instance,
                                const AdaptationConfig& config, const std::string& proverb = {});

// Each stage rewrites only counselor_text. Provider failures leave the
// instance unchanged and are recorded in the entry's `error`.

StageResult inject_ubuntu(const corpus::TurnInstance& instance, const AdaptationConfig& config,
                          llm::Gateway& gateway);

StageResult simplify_language(const corpus::TurnInstance& instance, const AdaptationConfig& config,
                              llm::Gateway& gateway);

StageResult remove_clinical_terms(const corpus::TurnInstance& instance,
                                  const AdaptationConfig& config, llm::Gateway& gateway);

/// Asks whether scripture would help; on yes draws u from `rng` and
/// integrates a verse when u <= faith_threshold.
StageResult integrate_faith(const corpus::TurnInstance& instance, const AdaptationConfig& config,
                            llm::Gateway& gateway, RandomStream& rng);

/// Asks whether a proverb would help; on yes draws the gate, then up to
/// max_proverb_attempts uniform registry indices until one is judged
/// suitable, and integrates it.
StageResult integrate_proverb(const corpus::TurnInstance& instance, const AdaptationConfig& config,
                              llm::Gateway& gateway, RandomStream& rng,
                              const ProverbRegistry& registry);

}  // namespace karabo::adaptation
