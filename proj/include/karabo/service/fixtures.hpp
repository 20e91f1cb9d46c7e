#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace karabo::service {

struct SymptomAnnotation {
  /// "MDD", "GAD" or "both".
  std::string category;
  /// Category as printed in the source table.
  std::string category_label;
  std::string symptom;
  std::string indicator;
};

struct CaseStudyFixture {
  int case_id = 0;
  std::string title;
  std::vector<std::string> ubuntu_tenets;
  std::string narrative;
  std::vector<SymptomAnnotation> symptom_annotations;
};

/// Throws E_SCHEMA on missing fields, duplicate ids, or ids outside 1..9.
std::vector<CaseStudyFixture> parse_case_studies(const nlohmann::json& j);

/// The nine bundled case studies.
const std::vector<CaseStudyFixture>& bundled_case_studies();

enum class IntegrityMode {
  /// Indicator must occur in the narrative after collapsing whitespace.
  Exact,
  /// Case, quotes and punctuation are ignored, and an ellipsis in the
  /// indicator matches any gap.
  Lenient,
};

struct IntegrityIssue {
  int case_id = 0;
  std::size_t annotation_index = 0;
  std::string indicator;
};

/// Annotations whose indicator is not found in its narrative.
std::vector<IntegrityIssue> check_fixture_integrity(const std::vector<CaseStudyFixture>& fixtures,
                                                    IntegrityMode mode = IntegrityMode::Exact);

bool indicator_found(const std::string& narrative, const std::string& indicator, IntegrityMode mode);

}  // namespace karabo::service
