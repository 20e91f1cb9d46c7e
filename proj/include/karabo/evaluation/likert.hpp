#pragma once

#include <array>
#include <istream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace karabo::evaluation {

enum class LikertSection { Ubuntu, Faith, Proverb };

inline constexpr std::array<LikertSection, 3> kLikertSections = {LikertSection::Ubuntu, LikertSection::Faith,
                                                                 LikertSection::Proverb};

std::string_view to_string(LikertSection s);
/// Accepts "integration" for the proverb section.
LikertSection likert_section_from_string(std::string_view s);

inline constexpr int kLikertMin = 1;
inline constexpr int kLikertMax = 5;

struct LikertRating {
  LikertSection section = LikertSection::Ubuntu;
  std::string item_id;
  std::string rater_id;
  int score = 0;
};

struct SectionSummary {
  std::size_t count = 0;
  /// 0 when count is 0.
  double mean = 0.0;
};

struct LikertSummary {
  std::array<SectionSummary, 3> sections{};
  /// Pooled over every rating, not the mean of section means.
  SectionSummary overall;

  const SectionSummary& section(LikertSection s) const { return sections[static_cast<int>(s)]; }
  nlohmann::json to_json() const;
};

/// Throws E_RANGE on a score outside 1..5.
LikertSummary likert_summary(std::span<const LikertRating> ratings);

/// CSV with a header naming section, item_id, rater_id and score in any
/// order. Throws E_SCHEMA on malformed rows and E_RANGE on bad scores.
std::vector<LikertRating> parse_likert_csv(std::istream& in);

}  // namespace karabo::evaluation
