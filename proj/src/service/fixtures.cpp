#include "karabo/service/fixtures.hpp"

#include <set>

#include "karabo/embedded_data.hpp"
#include "karabo/error.hpp"
#include "karabo/evaluation/detectors.hpp"
#include "karabo/text.hpp"

namespace karabo::service {

std::vector<CaseStudyFixture> parse_case_studies(const nlohmann::json& j) {
  if (!j.is_array()) throw Error(ErrorCode::Schema, "case studies must be an array");
  std::vector<CaseStudyFixture> out;
  std::set<int> ids;
  try {
    for (const auto& item : j) {
      CaseStudyFixture f;
      f.case_id = item.at("case_id").get<int>();
      if (f.case_id < 1 || f.case_id > 9)
        throw Error(ErrorCode::Schema, "case id " + std::to_string(f.case_id) + " outside 1..9");
      if (!ids.insert(f.case_id).second)
        throw Error(ErrorCode::Schema, "duplicate case id " + std::to_string(f.case_id));
      f.title = item.value("title", "");
      f.ubuntu_tenets = item.at("ubuntu_tenets").get<std::vector<std::string>>();
      f.narrative = item.at("narrative").get<std::string>();
      if (text::trim(f.narrative).empty())
        throw Error(ErrorCode::Schema, "case " + std::to_string(f.case_id) + " has an empty narrative");
      for (const auto& a : item.at("symptom_annotations")) {
        SymptomAnnotation s;
        s.category = a.at("category").get<std::string>();
        if (s.category != "MDD" && s.category != "GAD" && s.category != "both")
          throw Error(ErrorCode::Schema, "case " + std::to_string(f.case_id) + ": unknown category '" +
                                             s.category + "'");
        s.category_label = a.value("category_label", s.category);
        s.symptom = a.at("symptom").get<std::string>();
        s.indicator = a.at("indicator").get<std::string>();
        f.symptom_annotations.push_back(std::move(s));
      }
      out.push_back(std::move(f));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Schema, std::string("case studies: ") + e.what());
  }
  return out;
}

const std::vector<CaseStudyFixture>& bundled_case_studies() {
  static const std::vector<CaseStudyFixture> kCases =
      parse_case_studies(nlohmann::json::parse(embedded::case_studies_json()));
  return kCases;
}

namespace {

std::vector<std::string> split_on_ellipsis(const std::string& s) {
  std::vector<std::string> parts;
  std::string cur;
  for (std::size_t i = 0; i < s.size();) {
    if (s.compare(i, 3, "...") == 0) {
      parts.push_back(cur);
      cur.clear();
      while (i < s.size() && s[i] == '.') ++i;
    } else if (s.compare(i, 3, "\xE2\x80\xA6") == 0) {
      parts.push_back(cur);
      cur.clear();
      i += 3;
    } else {
      cur += s[i++];
    }
  }
  parts.push_back(cur);
  return parts;
}

}  // namespace

bool indicator_found(const std::string& narrative, const std::string& indicator, IntegrityMode mode) {
  if (mode == IntegrityMode::Exact) {
    const auto needle = text::collapse_whitespace(indicator);
    return !needle.empty() && text::collapse_whitespace(narrative).find(needle) != std::string::npos;
  }
  const auto hay = evaluation::normalize_for_match(narrative);
  std::size_t pos = 0;
  bool any = false;
  for (const auto& part : split_on_ellipsis(indicator)) {
    const auto needle = evaluation::normalize_for_match(part);
    if (needle.empty()) continue;
    any = true;
    const auto at = hay.find(needle, pos);
    if (at == std::string::npos) return false;
    pos = at + needle.size();
  }
  return any;
}

std::vector<IntegrityIssue> check_fixture_integrity(const std::vector<CaseStudyFixture>& fixtures,
                                                    IntegrityMode mode) {
  std::vector<IntegrityIssue> issues;
  for (const auto& f : fixtures) {
    for (std::size_t i = 0; i < f.symptom_annotations.size(); ++i) {
      const auto& a = f.symptom_annotations[i];
      if (!indicator_found(f.narrative, a.indicator, mode)) issues.push_back({f.case_id, i, a.indicator});
    }
  }
  return issues;
}

}  // namespace karabo::service
