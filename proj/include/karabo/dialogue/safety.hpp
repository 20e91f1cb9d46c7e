#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace karabo::dialogue {

struct CrisisMatch {
  std::string phrase;
};

/// High-recall phrases indicating risk of self-harm.
const std::vector<std::string>& default_crisis_lexicon();

/// Notice prepended to replies when the screen fires.
const std::string& default_safety_notice();

/// First lexicon phrase occurring in `text`, compared after case folding.
std::optional<CrisisMatch> crisis_screen(std::string_view text, const std::vector<std::string>& lexicon);

}  // namespace karabo::dialogue
