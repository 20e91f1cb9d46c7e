#include "karabo/dialogue/persona.hpp"

#include <algorithm>
#include <map>

#include "karabo/error.hpp"
#include "karabo/text.hpp"

namespace karabo::dialogue {

namespace {

constexpr const char* kDefaultTemplate =
    "Your name is {assistant_name}, an empathetic and engaging assistant who provides support "
    "based on the Ubuntu philosophy, which emphasizes {pillar_names}. Your goal is to guide users "
    "with compassion, helping them strengthen their social bonds, make responsible choices, "
    "develop self-awareness, and understand their place within their community and the broader "
    "cultural context. Your overall aim is to help alleviate symptoms of depression, anxiety, and "
    "stress.\n\n"
    "To achieve the goal of alleviating user distress, the model follows a structured "
    "conversational flow. {flow_steps}\n\n"
    "Communication is guided by culturally and contextually sensitive principles. "
    "{communication_rules} The overarching objective is to provide compassionate, culturally "
    "aligned support that helps the user feel better.";

const std::vector<std::string> kRequired = {"assistant_name", "pillar_names", "flow_steps",
                                            "communication_rules"};

std::vector<std::string> string_list(const nlohmann::json& j, const char* key) {
  if (!j.is_array()) throw Error(ErrorCode::Schema, std::string("persona: '") + key + "' must be an array");
  std::vector<std::string> out;
  for (const auto& item : j) {
    if (!item.is_string()) throw Error(ErrorCode::Schema, std::string("persona: '") + key + "' entries must be strings");
    out.push_back(item.get<std::string>());
  }
  return out;
}

}  // namespace

PersonaPrompt PersonaPrompt::defaults() {
  PersonaPrompt p;
  p.ubuntu_pillars = {
      {"Connectedness", "social bonds, relationships, belonging, and connection with divinity"},
      {"Competency", "personal development, responsible choices, and future aspirations"},
      {"Consciousness", "self-awareness, mindfulness, and one's place in the wider social and cultural context"},
  };
  p.flow_steps = {
      "First, it identifies symptoms of depression or anxiety based on user input.",
      "It then engages the user empathetically, exploring the reasons behind their emotional state.",
      "Using cognitive restructuring techniques helps the user challenge negative thoughts and move "
      "toward a more adaptive mindset.",
      "This is followed by behavioral activation rooted in Ubuntu philosophy, encouraging actionable "
      "steps that promote well-being through self-awareness, social connectedness, and community "
      "participation.",
      "Throughout the interaction, the model periodically checks the user's emotional state to "
      "ensure the conversation remains supportive and responsive to their needs.",
  };
  p.communication_rules = {
      "If appropriate, the model assumes the user is Christian and may use scripture for comfort.",
      "It incorporates relevant idioms to enhance relatability and avoids clinical terms like "
      "\"anxiety\" or \"depression\" to reduce stigma.",
  };
  p.template_text = kDefaultTemplate;
  return p;
}

PersonaPrompt PersonaPrompt::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::Schema, "persona must be an object");
  PersonaPrompt p = defaults();
  if (j.contains("assistant_name")) p.assistant_name = j.at("assistant_name").get<std::string>();
  if (j.contains("ubuntu_pillars")) {
    const auto& arr = j.at("ubuntu_pillars");
    if (!arr.is_array()) throw Error(ErrorCode::Schema, "persona: 'ubuntu_pillars' must be an array");
    p.ubuntu_pillars.clear();
    for (const auto& item : arr) {
      Pillar pillar;
      if (item.is_string()) {
        pillar.name = item.get<std::string>();
      } else if (item.is_object()) {
        pillar.name = item.value("name", "");
        pillar.description = item.value("description", "");
      } else {
        throw Error(ErrorCode::Schema, "persona: pillar must be a string or object");
      }
      p.ubuntu_pillars.push_back(std::move(pillar));
    }
  }
  if (j.contains("flow_steps")) p.flow_steps = string_list(j.at("flow_steps"), "flow_steps");
  if (j.contains("communication_rules"))
    p.communication_rules = string_list(j.at("communication_rules"), "communication_rules");
  if (j.contains("template")) p.template_text = j.at("template").get<std::string>();
  return p;
}

nlohmann::json PersonaPrompt::to_json() const {
  nlohmann::json pillars = nlohmann::json::array();
  for (const auto& pl : ubuntu_pillars) pillars.push_back({{"name", pl.name}, {"description", pl.description}});
  return {{"assistant_name", assistant_name},
          {"ubuntu_pillars", pillars},
          {"flow_steps", flow_steps},
          {"communication_rules", communication_rules},
          {"template", template_text}};
}

std::string render_system_prompt(const PersonaPrompt& persona) {
  if (text::trim(persona.assistant_name).empty())
    throw Error(ErrorCode::Template, "persona has no assistant name");
  if (persona.ubuntu_pillars.size() != 3)
    throw Error(ErrorCode::Template, "persona needs exactly three Ubuntu pillars, got " +
                                         std::to_string(persona.ubuntu_pillars.size()));
  std::vector<std::string> names;
  std::vector<std::string> descriptions;
  for (const auto& pl : persona.ubuntu_pillars) {
    if (text::trim(pl.name).empty()) throw Error(ErrorCode::Template, "persona has an unnamed pillar");
    names.push_back(pl.name);
    descriptions.push_back(pl.description.empty() ? pl.name : pl.name + " (" + pl.description + ")");
  }
  if (persona.flow_steps.empty()) throw Error(ErrorCode::Template, "persona has no flow steps");
  if (persona.communication_rules.empty())
    throw Error(ErrorCode::Template, "persona has no communication rules");

  const auto used = text::template_placeholders(persona.template_text);
  for (const auto& key : kRequired) {
    if (std::find(used.begin(), used.end(), key) == used.end())
      throw Error(ErrorCode::Template, "persona template lacks {" + key + "}");
  }

  const std::map<std::string, std::string> values = {
      {"assistant_name", persona.assistant_name},
      {"pillar_names", text::join_series(names)},
      {"pillar_descriptions", text::join_series(descriptions)},
      {"flow_steps", text::join(persona.flow_steps, " ")},
      {"communication_rules", text::join(persona.communication_rules, " ")},
  };
  return text::render_template(persona.template_text, values);
}

}  // namespace karabo::dialogue
