#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "karabo/adaptation/registry.hpp"

namespace karabo::evaluation {

struct TermMatch {
  /// Lexicon entry that matched.
  std::string term;
  /// Text as it appears in the input.
  std::string matched;
  std::size_t offset = 0;
  std::size_t length = 0;
};

const std::vector<std::string>& default_clinical_lexicon();

/// Whole-word, ASCII case-insensitive matches in left-to-right order. At
/// each position the longest matching entry wins and scanning resumes after
/// it, so matches never overlap.
std::vector<TermMatch> detect_clinical_terms(std::string_view text,
                                             const std::vector<std::string>& lexicon = default_clinical_lexicon());

struct ScriptureRef {
  /// Canonical book name from the canon list.
  std::string book;
  int chapter = 0;
  int verse_start = 0;
  std::optional<int> verse_end;
  std::size_t offset = 0;
  std::size_t length = 0;

  bool operator==(const ScriptureRef&) const = default;
};

/// The 66 Protestant books, numbered books written "1 Corinthians".
const std::vector<std::string>& default_canon();

/// `[N ]Book Chapter:Verse[-Verse]` references, book names matched
/// case-insensitively against `canon`.
std::vector<ScriptureRef> detect_scripture(std::string_view text,
                                           const std::vector<std::string>& canon = default_canon());

/// Lower-cased, punctuation-free, whitespace-collapsed form used for
/// proverb matching.
std::string normalize_for_match(std::string_view text);

/// 1-based registry indices whose normalized proverb occurs in the
/// normalized text on word boundaries, ascending.
std::vector<std::size_t> detect_proverb(std::string_view text, const adaptation::ProverbRegistry& registry);

struct SimplicityMetrics {
  double mean_sentence_length_words = 0.0;
  double mean_word_length_chars = 0.0;
  /// Share of words longer than eight characters.
  double long_word_ratio = 0.0;
  std::size_t sentences = 0;
  std::size_t words = 0;
  bool empty = true;
};

SimplicityMetrics simplicity_metrics(std::string_view text);

nlohmann::json to_json(const TermMatch& m);
nlohmann::json to_json(const ScriptureRef& r);
nlohmann::json to_json(const SimplicityMetrics& m);

}  // namespace karabo::evaluation
