#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace karabo::dialogue {

struct Pillar {
  std::string name;
  std::string description;
};

/// The assistant persona behind the system prompt.
///
/// The template may reference {assistant_name}, {pillar_names},
/// {pillar_descriptions}, {flow_steps} and {communication_rules}; the first
/// four of those other than {pillar_descriptions} are required.
struct PersonaPrompt {
  std::string assistant_name = "Karabo";
  std::vector<Pillar> ubuntu_pillars;
  /// In conversational order.
  std::vector<std::string> flow_steps;
  std::vector<std::string> communication_rules;
  std::string template_text;

  static PersonaPrompt defaults();

  static PersonaPrompt from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

/// Deterministic rendering. Throws E_TEMPLATE when the persona is
/// incomplete (no name, not exactly three named pillars, no flow steps or
/// rules) or the template lacks a required placeholder.
std::string render_system_prompt(const PersonaPrompt& persona);

}  // namespace karabo::dialogue
