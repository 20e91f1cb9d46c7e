#include "karabo/adaptation/stages.hpp"

#include "karabo/error.hpp"
#include "karabo/text.hpp"

namespace karabo::adaptation {

namespace {

StageEntry begin_entry(Stage stage, const corpus::TurnInstance& instance, bool enabled) {
  StageEntry e;
  e.stage = stage;
  e.enabled = enabled;
  e.before_hash = text::sha256_hex(instance.counselor_text);
  return e;
}

void finish_entry(StageResult& r) {
  r.entry.after_hash = text::sha256_hex(r.instance.counselor_text);
  r.entry.applied = r.entry.after_hash != r.entry.before_hash;
}

std::string describe(const Error& e) { return std::string(e.code_name()) + ": " + e.what(); }

/// Sends the stage prompt and swaps in the rewrite. An empty completion
/// keeps the original and leaves a warning.
void rewrite(StageResult& r, Stage stage, const char* label, const AdaptationConfig& config,
             llm::Gateway& gateway, const std::string& proverb = {}) {
  llm::ChatRequest req;
  req.system_prompt = render_stage_prompt(stage, r.instance, config, proverb);
  req.messages.push_back({llm::Role::User, r.instance.counselor_text});
  req.temperature = config.temperature;
  req.max_tokens = config.max_tokens;
  req.stage = label;
  try {
    auto out = text::trim(gateway.complete(req));
    if (out != text::trim(r.instance.counselor_text)) r.instance.counselor_text = std::move(out);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::EmptyCompletion) throw;
    r.entry.warnings.push_back("empty rewrite; original kept");
  }
}

bool ask(llm::Gateway& gateway, const corpus::TurnInstance& instance, const std::string& response,
         const std::string& question, const char* label) {
  llm::JudgeQuery q;
  q.context = instance_transcript(instance);
  q.response = response;
  q.question = question;
  q.stage = label;
  return gateway.judge(q).is_yes();
}

StageResult rewrite_stage(Stage stage, const char* label, const corpus::TurnInstance& instance,
                          const AdaptationConfig& config, llm::Gateway& gateway) {
  StageResult r{instance, begin_entry(stage, instance, config.enabled(stage))};
  if (r.entry.enabled) {
    r.entry.gated_in = true;
    try {
      rewrite(r, stage, label, config, gateway);
    } catch (const Error& e) {
      r.instance = instance;
      r.entry.gated_in = false;
      r.entry.error = describe(e);
    }
  }
  finish_entry(r);
  return r;
}

}  // namespace

std::string instance_transcript(const corpus::TurnInstance& instance) {
  return "Client: " + instance.client_text + "\nCounselor: " + instance.counselor_text;
}

std::string render_stage_prompt(Stage stage, const corpus::TurnInstance& instance,
                                const AdaptationConfig& config, const std::string& proverb) {
  return text::render_template(config.templates.rewrite_template(stage),
                               {{"client_text", instance.client_text},
                                {"counselor_text", instance.counselor_text},
                                {"ubuntu_description", config.ubuntu_description},
                                {"proverb", proverb}});
}

StageResult inject_ubuntu(const corpus::TurnInstance& instance, const AdaptationConfig& config,
                          llm::Gateway& gateway) {
  return rewrite_stage(Stage::Ubuntu, stage_labels::kUbuntu, instance, config, gateway);
}

StageResult simplify_language(const corpus::TurnInstance& instance, const AdaptationConfig& config,
                              llm::Gateway& gateway) {
  return rewrite_stage(Stage::Simplify, stage_labels::kSimplify, instance, config, gateway);
}

StageResult remove_clinical_terms(const corpus::TurnInstance& instance,
                                  const AdaptationConfig& config, llm::Gateway& gateway) {
  return rewrite_stage(Stage::Declinical, stage_labels::kDeclinical, instance, config, gateway);
}

StageResult integrate_faith(const corpus::TurnInstance& instance, const AdaptationConfig& config,
                            llm::Gateway& gateway, RandomStream& rng) {
  StageResult r{instance, begin_entry(Stage::Faith, instance, config.enabled(Stage::Faith))};
  if (r.entry.enabled) {
    try {
      const bool yes = ask(gateway, instance, instance.counselor_text, config.templates.faith_question,
                           stage_labels::kFaithBenefit);
      r.entry.judge_decision = yes;
      if (yes) {
        const double u = rng.uniform01();
        r.entry.gate_draw = u;
        if (u <= config.faith_threshold) {
          r.entry.gated_in = true;
          rewrite(r, Stage::Faith, stage_labels::kFaithIntegrate, config, gateway);
        }
      }
    } catch (const Error& e) {
      r.instance = instance;
      r.entry.error = describe(e);
    }
  }
  finish_entry(r);
  return r;
}

StageResult integrate_proverb(const corpus::TurnInstance& instance, const AdaptationConfig& config,
                              llm::Gateway& gateway, RandomStream& rng,
                              const ProverbRegistry& registry) {
  StageResult r{instance, begin_entry(Stage::Proverb, instance, config.enabled(Stage::Proverb))};
  if (r.entry.enabled) {
    if (registry.empty()) throw Error(ErrorCode::Config, "proverb stage enabled with an empty registry");
    try {
      const bool yes = ask(gateway, instance, instance.counselor_text,
                           config.templates.proverb_benefit_question, stage_labels::kProverbBenefit);
      r.entry.judge_decision = yes;
      if (yes) {
        const double u = rng.uniform01();
        r.entry.gate_draw = u;
        if (u <= config.proverb_threshold) {
          r.entry.gated_in = true;
          for (int attempt = 0; attempt < config.max_proverb_attempts; ++attempt) {
            const std::size_t index = rng.uniform_index(1, registry.size());
            const auto& proverb = registry.at(index);
            const bool suitable = ask(gateway, instance, proverb,
                                      config.templates.proverb_suitability_question,
                                      stage_labels::kProverbSuitability);
            r.entry.proverb_attempts.push_back({index, suitable});
            if (suitable) {
              rewrite(r, Stage::Proverb, stage_labels::kProverbIntegrate, config, gateway, proverb);
              break;
            }
          }
          if (!r.entry.proverb_attempts.empty() && !r.entry.proverb_attempts.back().suitable) {
            r.entry.warnings.push_back("no suitable proverb found; left unchanged");
          }
        }
      }
    } catch (const Error& e) {
      r.instance = instance;
      r.entry.error = describe(e);
    }
  }
  finish_entry(r);
  return r;
}

}  // namespace karabo::adaptation
