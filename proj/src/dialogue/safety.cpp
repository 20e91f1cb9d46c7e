#include "karabo/dialogue/safety.hpp"

#include "karabo/text.hpp"

namespace karabo::dialogue {

const std::vector<std::string>& default_crisis_lexicon() {
  static const std::vector<std::string> kLexicon = {
      "kill myself",       "killing myself",    "end my life",      "ending my life",
      "take my own life",  "take my life",      "suicide",          "suicidal",
      "want to die",       "wish i was dead",   "wish i were dead", "better off dead",
      "better off without me", "no reason to live", "not worth living", "end it all",
      "hurt myself",       "harm myself",       "self-harm",        "self harm",
      "cut myself",        "overdose",
  };
  return kLexicon;
}

const std::string& default_safety_notice() {
  static const std::string kNotice =
      "If you are thinking about harming yourself or you feel unsafe, please reach out for help "
      "now. In South Africa you can call the SADAG Suicide Crisis Helpline on 0800 567 567 (free, "
      "24 hours) or contact your local emergency services. You do not have to face this alone.";
  return kNotice;
}

std::optional<CrisisMatch> crisis_screen(std::string_view text, const std::vector<std::string>& lexicon) {
  if (lexicon.empty()) return std::nullopt;
  const auto folded = text::case_fold(text);
  for (const auto& phrase : lexicon) {
    const auto needle = text::case_fold(text::trim(phrase));
    if (!needle.empty() && folded.find(needle) != std::string::npos) return CrisisMatch{phrase};
  }
  return std::nullopt;
}

}  // namespace karabo::dialogue
