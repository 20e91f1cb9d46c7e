#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace karabo::adaptation {

/// Pipeline stages, in execution order.
enum class Stage { Ubuntu, Simplify, Declinical, Faith, Proverb };

inline constexpr std::array<Stage, 5> kStages{Stage::Ubuntu, Stage::Simplify, Stage::Declinical,
                                              Stage::Faith, Stage::Proverb};

std::string_view to_string(Stage s);
std::optional<Stage> stage_from_string(std::string_view s);
inline std::size_t index_of(Stage s) { return static_cast<std::size_t>(s); }

/// Prompt templates. Rewrite templates become the system prompt of a
/// request whose single user message is the counselor reply; they may
/// reference {client_text}, {counselor_text}, {ubuntu_description} and
/// {proverb}.
struct StageTemplates {
  std::string ubuntu;
  std::string simplify;
  std::string declinical;
  std::string faith;
  std::string proverb;

  std::string faith_question;
  std::string proverb_benefit_question;
  std::string proverb_suitability_question;

  const std::string& rewrite_template(Stage s) const;
};

struct AdaptationConfig {
  double faith_threshold = 0.7;
  double proverb_threshold = 0.8;
  int max_proverb_attempts = 3;
  std::uint64_t rng_seed = 0;
  std::array<bool, 5> stage_toggles{true, true, true, true, true};
  StageTemplates templates;
  /// Description of Ubuntu interpolated into {ubuntu_description}.
  std::string ubuntu_description;
  double temperature = 0.7;
  int max_tokens = 1024;

  static AdaptationConfig defaults();

  bool enabled(Stage s) const { return stage_toggles[index_of(s)]; }

  /// Throws E_CONFIG (or E_TEMPLATE for malformed templates).
  void validate() const;

  /// Missing keys keep their defaults.
  static AdaptationConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  /// Parses "ubuntu,simplify,faith" into toggles; "all" enables everything
  /// and "none" disables everything.
  static std::array<bool, 5> parse_stage_list(std::string_view list);
};

}  // namespace karabo::adaptation
