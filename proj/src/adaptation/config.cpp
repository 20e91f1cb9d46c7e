#include "karabo/adaptation/config.hpp"

#include "karabo/error.hpp"
#include "karabo/text.hpp"

namespace karabo::adaptation {

using nlohmann::json;

namespace {

constexpr const char* kStageNames[] = {"ubuntu", "simplify", "declinical", "faith", "proverb"};

const char* const kKnownPlaceholders[] = {"client_text", "counselor_text", "ubuntu_description",
                                          "proverb"};

constexpr const char* kUbuntuDescription =
    "Ubuntu is the Southern African philosophy of interdependence: a person is a person through "
    "other people. It rests on three pillars. Connectedness: social bonds, relationships, a sense "
    "of belonging, and connection with divinity. Competency: personal development, responsible "
    "choices, good behaviour, personal responsibility, future aspirations, and recognition of "
    "individual uniqueness. Consciousness: self-awareness, mindfulness, and understanding one's "
    "place in a broader social and cultural context.";

constexpr const char* kUbuntuTemplate =
    "You adapt counselling conversations for people in South Africa.\n\n"
    "{ubuntu_description}\n\n"
    "The client said:\n{client_text}\n\n"
    "The user message is the counselor's reply. Rewrite it so that it reflects Ubuntu through "
    "Connectedness, Competency, and Consciousness, for example by drawing on family, community, "
    "and shared responsibility. Keep its therapeutic intent. Do not change or repeat the client's "
    "words. Return only the rewritten reply.";

constexpr const char* kSimplifyTemplate =
    "The user message is a counselor's reply to this client:\n{client_text}\n\n"
    "Rewrite the reply in clear, simple English for readers whose first language is not English. "
    "Use short sentences and everyday words, and keep the meaning. Return only the rewritten "
    "reply.";

constexpr const char* kDeclinicalTemplate =
    "The user message is a counselor's reply to this client:\n{client_text}\n\n"
    "Replace clinical labels such as \"depression\", \"depressed\", \"anxiety\", \"anxious\", "
    "\"disorder\" and \"diagnosis\" with everyday descriptions of how the body and feelings are "
    "affected, such as \"feeling heavy\", \"tired\", \"discouraged\" or \"a restless heart\". Keep "
    "everything else the same. Return only the rewritten reply.";

constexpr const char* kFaithTemplate =
    "The user message is a counselor's reply to this client:\n{client_text}\n\n"
    "Assume the client is Christian. Integrate one short, relevant Bible verse, with its "
    "reference, into the reply so that it offers comfort. Keep the rest of the reply. Return only "
    "the revised reply.";

constexpr const char* kProverbTemplate =
    "The user message is a counselor's reply to this client:\n{client_text}\n\n"
    "Integrate this African proverb into the reply and briefly connect it to the client's "
    "situation: \"{proverb}\". Keep the rest of the reply. Return only the revised reply.";

constexpr const char* kFaithQuestion =
    "Would adding scripture-based comfort enhance the counselor's response? Answer yes or no.";
constexpr const char* kProverbBenefitQuestion =
    "Would this counselor response benefit from an African proverb? Answer yes or no.";
constexpr const char* kProverbSuitabilityQuestion = "Is this proverb suitable for this context?";

void check_placeholders(const std::string& tmpl, const char* name) {
  for (const auto& p : text::template_placeholders(tmpl)) {
    bool known = false;
    for (const char* k : kKnownPlaceholders) known = known || p == k;
    if (!known) {
      throw Error(ErrorCode::Template,
                  std::string("template '") + name + "' uses unknown placeholder {" + p + "}");
    }
  }
}

}  // namespace

std::string_view to_string(Stage s) { return kStageNames[index_of(s)]; }

std::optional<Stage> stage_from_string(std::string_view s) {
  const auto lower = text::ascii_lower(text::trim(s));
  for (Stage st : kStages) {
    if (lower == kStageNames[index_of(st)]) return st;
  }
  return std::nullopt;
}

const std::string& StageTemplates::rewrite_template(Stage s) const {
  switch (s) {
    case Stage::Ubuntu: return ubuntu;
    case Stage::Simplify: return simplify;
    case Stage::Declinical: return declinical;
    case Stage::Faith: return faith;
    case Stage::Proverb: return proverb;
  }
  return ubuntu;
}

AdaptationConfig AdaptationConfig::defaults() {
  AdaptationConfig c;
  c.templates.ubuntu = kUbuntuTemplate;
  c.templates.simplify = kSimplifyTemplate;
  c.templates.declinical = kDeclinicalTemplate;
  c.templates.faith = kFaithTemplate;
  c.templates.proverb = kProverbTemplate;
  c.templates.faith_question = kFaithQuestion;
  c.templates.proverb_benefit_question = kProverbBenefitQuestion;
  c.templates.proverb_suitability_question = kProverbSuitabilityQuestion;
  c.ubuntu_description = kUbuntuDescription;
  return c;
}

void AdaptationConfig::validate() const {
  if (!(faith_threshold >= 0.0 && faith_threshold <= 1.0)) {
    throw Error(ErrorCode::Config, "faith_threshold must be in [0, 1]");
  }
  if (!(proverb_threshold >= 0.0 && proverb_threshold <= 1.0)) {
    throw Error(ErrorCode::Config, "proverb_threshold must be in [0, 1]");
  }
  if (max_proverb_attempts < 1) throw Error(ErrorCode::Config, "max_proverb_attempts must be >= 1");
  if (max_tokens < 1) throw Error(ErrorCode::Config, "max_tokens must be >= 1");
  if (!(temperature >= 0.0)) throw Error(ErrorCode::Config, "temperature must be >= 0");
  for (Stage s : kStages) {
    if (!enabled(s)) continue;
    const auto& t = templates.rewrite_template(s);
    if (text::trim(t).empty()) {
      throw Error(ErrorCode::Config, "stage '" + std::string(to_string(s)) + "' has an empty template");
    }
    check_placeholders(t, kStageNames[index_of(s)]);
  }
  if (enabled(Stage::Faith) && text::trim(templates.faith_question).empty()) {
    throw Error(ErrorCode::Config, "faith stage has an empty benefit question");
  }
  if (enabled(Stage::Proverb) && (text::trim(templates.proverb_benefit_question).empty() ||
                                  text::trim(templates.proverb_suitability_question).empty())) {
    throw Error(ErrorCode::Config, "proverb stage has an empty question");
  }
}

std::array<bool, 5> AdaptationConfig::parse_stage_list(std::string_view list) {
  const auto trimmed = text::ascii_lower(text::trim(list));
  if (trimmed == "all") return {true, true, true, true, true};
  std::array<bool, 5> toggles{false, false, false, false, false};
  if (trimmed == "none" || trimmed.empty()) return toggles;
  for (const auto& part : text::split(trimmed, ',')) {
    const auto s = stage_from_string(part);
    if (!s) throw Error(ErrorCode::Config, "unknown stage '" + part + "'");
    toggles[index_of(*s)] = true;
  }
  return toggles;
}

AdaptationConfig AdaptationConfig::from_json(const json& j) {
  AdaptationConfig c = defaults();
  if (!j.is_object()) throw Error(ErrorCode::Config, "adaptation config must be a JSON object");
  try {
    c.faith_threshold = j.value("faith_threshold", c.faith_threshold);
    c.proverb_threshold = j.value("proverb_threshold", c.proverb_threshold);
    c.max_proverb_attempts = j.value("max_proverb_attempts", c.max_proverb_attempts);
    c.rng_seed = j.value("rng_seed", c.rng_seed);
    c.temperature = j.value("temperature", c.temperature);
    c.max_tokens = j.value("max_tokens", c.max_tokens);
    c.ubuntu_description = j.value("ubuntu_description", c.ubuntu_description);
    if (auto it = j.find("stages"); it != j.end()) {
      if (it->is_string()) {
        c.stage_toggles = parse_stage_list(it->get<std::string>());
      } else {
        for (Stage s : kStages) {
          c.stage_toggles[index_of(s)] = it->value(kStageNames[index_of(s)], c.enabled(s));
        }
      }
    }
    if (auto it = j.find("templates"); it != j.end()) {
      auto& t = c.templates;
      t.ubuntu = it->value("ubuntu", t.ubuntu);
      t.simplify = it->value("simplify", t.simplify);
      t.declinical = it->value("declinical", t.declinical);
      t.faith = it->value("faith", t.faith);
      t.proverb = it->value("proverb", t.proverb);
      t.faith_question = it->value("faith_question", t.faith_question);
      t.proverb_benefit_question = it->value("proverb_benefit_question", t.proverb_benefit_question);
      t.proverb_suitability_question =
          it->value("proverb_suitability_question", t.proverb_suitability_question);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Config, std::string("bad adaptation config: ") + e.what());
  }
  return c;
}

json AdaptationConfig::to_json() const {
  json stages = json::object();
  for (Stage s : kStages) stages[kStageNames[index_of(s)]] = enabled(s);
  return json{{"faith_threshold", faith_threshold},
              {"proverb_threshold", proverb_threshold},
              {"max_proverb_attempts", max_proverb_attempts},
              {"rng_seed", rng_seed},
              {"temperature", temperature},
              {"max_tokens", max_tokens},
              {"stages", std::move(stages)},
              {"ubuntu_description", ubuntu_description},
              {"templates",
               {{"ubuntu", templates.ubuntu},
                {"simplify", templates.simplify},
                {"declinical", templates.declinical},
                {"faith", templates.faith},
                {"proverb", templates.proverb},
                {"faith_question", templates.faith_question},
                {"proverb_benefit_question", templates.proverb_benefit_question},
                {"proverb_suitability_question", templates.proverb_suitability_question}}}};
}

}  // namespace karabo::adaptation
