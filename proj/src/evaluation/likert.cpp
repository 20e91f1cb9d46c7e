#include "karabo/evaluation/likert.hpp"

#include <charconv>
#include <map>

#include "karabo/error.hpp"
#include "karabo/text.hpp"

namespace karabo::evaluation {

std::string_view to_string(LikertSection s) {
  switch (s) {
    case LikertSection::Ubuntu: return "ubuntu";
    case LikertSection::Faith: return "faith";
    case LikertSection::Proverb: return "proverb";
  }
  return "ubuntu";
}

LikertSection likert_section_from_string(std::string_view s) {
  const auto k = text::ascii_lower(text::trim(s));
  if (k == "ubuntu") return LikertSection::Ubuntu;
  if (k == "faith") return LikertSection::Faith;
  if (k == "proverb" || k == "integration") return LikertSection::Proverb;
  throw Error(ErrorCode::Schema, "unknown Likert section '" + std::string(s) + "'");
}

LikertSummary likert_summary(std::span<const LikertRating> ratings) {
  LikertSummary out;
  std::array<long long, 3> sums{};
  long long total = 0;
  for (const auto& r : ratings) {
    if (r.score < kLikertMin || r.score > kLikertMax)
      throw Error(ErrorCode::Range, "Likert score " + std::to_string(r.score) + " for item '" + r.item_id +
                                        "' is outside 1..5");
    const auto s = static_cast<int>(r.section);
    sums[s] += r.score;
    ++out.sections[s].count;
    total += r.score;
  }
  for (int s = 0; s < 3; ++s)
    if (out.sections[s].count)
      out.sections[s].mean = static_cast<double>(sums[s]) / static_cast<double>(out.sections[s].count);
  out.overall.count = ratings.size();
  if (!ratings.empty()) out.overall.mean = static_cast<double>(total) / static_cast<double>(ratings.size());
  return out;
}

nlohmann::json LikertSummary::to_json() const {
  nlohmann::json secs;
  for (auto s : kLikertSections)
    secs[std::string(evaluation::to_string(s))] = {{"count", section(s).count}, {"mean", section(s).mean}};
  return {{"sections", secs}, {"overall", {{"count", overall.count}, {"mean", overall.mean}}}};
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line, std::size_t lineno) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  if (quoted) throw Error(ErrorCode::Schema, "line " + std::to_string(lineno) + ": unterminated quote");
  fields.push_back(std::move(cur));
  return fields;
}

}  // namespace

std::vector<LikertRating> parse_likert_csv(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  std::map<std::string, std::size_t> col;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    auto header = split_csv_line(line, lineno);
    for (std::size_t i = 0; i < header.size(); ++i) col[text::ascii_lower(text::trim(header[i]))] = i;
    break;
  }
  for (const char* need : {"section", "item_id", "rater_id", "score"})
    if (!col.count(need)) throw Error(ErrorCode::Schema, std::string("Likert CSV lacks a '") + need + "' column");

  std::vector<LikertRating> out;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    auto f = split_csv_line(line, lineno);
    if (f.size() != col.size())
      throw Error(ErrorCode::Schema, "line " + std::to_string(lineno) + ": expected " + std::to_string(col.size()) +
                                         " fields, got " + std::to_string(f.size()));
    LikertRating r;
    r.section = likert_section_from_string(f[col["section"]]);
    r.item_id = text::trim(f[col["item_id"]]);
    r.rater_id = text::trim(f[col["rater_id"]]);
    const auto score = text::trim(f[col["score"]]);
    auto [ptr, ec] = std::from_chars(score.data(), score.data() + score.size(), r.score);
    if (ec != std::errc() || ptr != score.data() + score.size())
      throw Error(ErrorCode::Schema, "line " + std::to_string(lineno) + ": score '" + score + "' is not an integer");
    if (r.score < kLikertMin || r.score > kLikertMax)
      throw Error(ErrorCode::Range, "line " + std::to_string(lineno) + ": score " + score + " is outside 1..5");
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace karabo::evaluation
