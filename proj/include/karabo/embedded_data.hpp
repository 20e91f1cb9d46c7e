#pragma once

#include <string_view>

namespace karabo::embedded {

/// data/case_studies.json
std::string_view case_studies_json();

/// data/proverbs_placeholder.txt
std::string_view placeholder_proverbs();

}  // namespace karabo::embedded
