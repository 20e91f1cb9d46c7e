#include "karabo/evaluation/detectors.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <regex>

#include "karabo/text.hpp"

namespace karabo::evaluation {

namespace {

bool is_word_byte(unsigned char c) { return std::isalnum(c) || c >= 0x80; }

}  // namespace

const std::vector<std::string>& default_clinical_lexicon() {
  static const std::vector<std::string> kLexicon = {
      "depression", "depressed",     "depressive",   "anxiety",       "anxious",
      "disorder",   "disorders",     "diagnosis",    "diagnosed",     "mental illness",
      "panic attack", "panic attacks", "psychiatric", "psychiatrist", "bipolar",
      "schizophrenia", "ptsd",
  };
  return kLexicon;
}

std::vector<TermMatch> detect_clinical_terms(std::string_view text, const std::vector<std::string>& lexicon) {
  std::vector<std::string> terms;
  for (const auto& t : lexicon) {
    auto k = text::ascii_lower(text::trim(t));
    if (!k.empty()) terms.push_back(k);
  }
  std::vector<std::size_t> idx(terms.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return terms[a].size() > terms[b].size(); });

  const auto lower = text::ascii_lower(text);
  std::vector<TermMatch> out;
  std::size_t pos = 0;
  while (pos < lower.size()) {
    const bool boundary_before = pos == 0 || !is_word_byte(static_cast<unsigned char>(lower[pos - 1]));
    bool matched = false;
    if (boundary_before) {
      for (auto i : idx) {
        const auto& term = terms[i];
        if (lower.compare(pos, term.size(), term) != 0) continue;
        const auto end = pos + term.size();
        if (end < lower.size() && is_word_byte(static_cast<unsigned char>(lower[end]))) continue;
        out.push_back({term, std::string(text.substr(pos, term.size())), pos, term.size()});
        pos = end;
        matched = true;
        break;
      }
    }
    if (!matched) ++pos;
  }
  return out;
}

const std::vector<std::string>& default_canon() {
  static const std::vector<std::string> kCanon = {
      "Genesis", "Exodus", "Leviticus", "Numbers", "Deuteronomy", "Joshua", "Judges", "Ruth",
      "1 Samuel", "2 Samuel", "1 Kings", "2 Kings", "1 Chronicles", "2 Chronicles", "Ezra",
      "Nehemiah", "Esther", "Job", "Psalms", "Psalm", "Proverbs", "Ecclesiastes", "Song of Solomon",
      "Song of Songs", "Isaiah", "Jeremiah", "Lamentations", "Ezekiel", "Daniel", "Hosea", "Joel",
      "Amos", "Obadiah", "Jonah", "Micah", "Nahum", "Habakkuk", "Zephaniah", "Haggai", "Zechariah",
      "Malachi", "Matthew", "Mark", "Luke", "John", "Acts", "Romans", "1 Corinthians",
      "2 Corinthians", "Galatians", "Ephesians", "Philippians", "Colossians", "1 Thessalonians",
      "2 Thessalonians", "1 Timothy", "2 Timothy", "Titus", "Philemon", "Hebrews", "James",
      "1 Peter", "2 Peter", "1 John", "2 John", "3 John", "Jude", "Revelation",
  };
  return kCanon;
}

namespace {

std::string book_key(std::string_view s) {
  std::string out;
  for (unsigned char c : s)
    if (!std::isspace(c)) out += static_cast<char>(std::tolower(c));
  return out;
}

std::string regex_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (std::string_view(R"(\^$.|?*+()[]{})").find(c) != std::string_view::npos) out += '\\';
    out += c;
  }
  return out;
}

struct CanonMatcher {
  std::regex pattern;
  std::map<std::string, std::string> canonical;
};

CanonMatcher build_matcher(const std::vector<std::string>& canon) {
  CanonMatcher m;
  std::vector<std::string> books;
  for (const auto& b : canon) {
    auto t = text::trim(b);
    if (t.empty()) continue;
    m.canonical.emplace(book_key(t), t);
    books.push_back(t);
  }
  std::sort(books.begin(), books.end(), [](const auto& a, const auto& b) { return a.size() > b.size(); });
  std::string alt;
  for (const auto& b : books) {
    std::string piece;
    for (const auto& word : text::split(b, ' ')) {
      if (word.empty()) continue;
      if (!piece.empty()) piece += std::isdigit(static_cast<unsigned char>(piece.back())) ? "\\s*" : "\\s+";
      piece += regex_escape(word);
    }
    if (!alt.empty()) alt += '|';
    alt += piece;
  }
  if (alt.empty()) alt = "(?!)";
  const std::string re = "(^|[^A-Za-z0-9])(" + alt +
                         ")\\s+(\\d{1,3}):(\\d{1,3})(?:\\s*(?:-|\xE2\x80\x93|\xE2\x80\x94)\\s*(\\d{1,3}))?(?![0-9:])";
  m.pattern = std::regex(re, std::regex::ECMAScript | std::regex::icase | std::regex::optimize);
  return m;
}

}  // namespace

std::vector<ScriptureRef> detect_scripture(std::string_view text, const std::vector<std::string>& canon) {
  static const CanonMatcher kDefault = build_matcher(default_canon());
  std::optional<CanonMatcher> custom;
  if (&canon != &default_canon()) custom = build_matcher(canon);
  const CanonMatcher& matcher = custom ? *custom : kDefault;

  std::vector<ScriptureRef> out;
  const std::string s(text);
  for (auto it = std::sregex_iterator(s.begin(), s.end(), matcher.pattern); it != std::sregex_iterator(); ++it) {
    const auto& m = *it;
    ScriptureRef r;
    auto found = matcher.canonical.find(book_key(m.str(2)));
    r.book = found != matcher.canonical.end() ? found->second : m.str(2);
    r.chapter = std::stoi(m.str(3));
    r.verse_start = std::stoi(m.str(4));
    if (m[5].matched) {
      const int end = std::stoi(m.str(5));
      if (end >= r.verse_start) r.verse_end = end;
    }
    r.offset = static_cast<std::size_t>(m.position(2));
    r.length = static_cast<std::size_t>(m.position(0) + m.length(0)) - r.offset;
    out.push_back(std::move(r));
  }
  return out;
}

std::string normalize_for_match(std::string_view input) {
  const auto folded = text::case_fold(input);
  std::string out;
  out.reserve(folded.size());
  for (std::size_t i = 0; i < folded.size(); ++i) {
    const auto c = static_cast<unsigned char>(folded[i]);
    if (c < 0x80) {
      out += std::isalnum(c) ? static_cast<char>(c) : ' ';
      continue;
    }
    // General punctuation block: curly quotes, dashes, ellipsis.
    if (c == 0xE2 && i + 2 < folded.size() && static_cast<unsigned char>(folded[i + 1]) == 0x80) {
      out += ' ';
      i += 2;
      continue;
    }
    out += static_cast<char>(c);
  }
  return text::collapse_whitespace(out);
}

std::vector<std::size_t> detect_proverb(std::string_view text, const adaptation::ProverbRegistry& registry) {
  const auto haystack = " " + normalize_for_match(text) + " ";
  std::vector<std::size_t> out;
  for (std::size_t i = 1; i <= registry.size(); ++i) {
    const auto needle = normalize_for_match(registry.at(i));
    if (needle.empty()) continue;
    if (haystack.find(" " + needle + " ") != std::string::npos) out.push_back(i);
  }
  return out;
}

namespace {

bool is_terminal(char c) { return c == '.' || c == '!' || c == '?'; }

std::string strip_punct(std::string_view w) {
  auto strip_front = [](std::string_view& s) {
    while (!s.empty()) {
      auto c = static_cast<unsigned char>(s.front());
      if (c < 0x80 && std::ispunct(c)) {
        s.remove_prefix(1);
      } else if (c == 0xE2 && s.size() >= 3 && static_cast<unsigned char>(s[1]) == 0x80) {
        s.remove_prefix(3);
      } else {
        break;
      }
    }
  };
  auto strip_back = [](std::string_view& s) {
    while (!s.empty()) {
      auto c = static_cast<unsigned char>(s.back());
      if (c < 0x80 && std::ispunct(c)) {
        s.remove_suffix(1);
      } else if (s.size() >= 3 && static_cast<unsigned char>(s[s.size() - 3]) == 0xE2 &&
                 static_cast<unsigned char>(s[s.size() - 2]) == 0x80) {
        s.remove_suffix(3);
      } else {
        break;
      }
    }
  };
  strip_front(w);
  strip_back(w);
  return std::string(w);
}

}  // namespace

SimplicityMetrics simplicity_metrics(std::string_view input) {
  SimplicityMetrics m;
  std::vector<std::string> sentences;
  std::string current;
  for (char c : input) {
    if (is_terminal(c)) {
      sentences.push_back(current);
      current.clear();
    } else {
      current += c;
    }
  }
  sentences.push_back(current);

  std::size_t chars = 0;
  std::size_t long_words = 0;
  for (const auto& s : sentences) {
    std::size_t words_here = 0;
    std::string token;
    auto flush = [&] {
      auto w = strip_punct(token);
      token.clear();
      if (w.empty()) return;
      const auto len = text::utf8_length(w);
      chars += len;
      long_words += len > 8;
      ++words_here;
    };
    for (char c : s) {
      if (std::isspace(static_cast<unsigned char>(c))) {
        flush();
      } else {
        token += c;
      }
    }
    flush();
    if (words_here > 0) {
      ++m.sentences;
      m.words += words_here;
    }
  }
  if (m.words == 0) return m;
  m.empty = false;
  m.mean_sentence_length_words = static_cast<double>(m.words) / static_cast<double>(m.sentences);
  m.mean_word_length_chars = static_cast<double>(chars) / static_cast<double>(m.words);
  m.long_word_ratio = static_cast<double>(long_words) / static_cast<double>(m.words);
  return m;
}

nlohmann::json to_json(const TermMatch& m) {
  return {{"term", m.term}, {"matched", m.matched}, {"offset", m.offset}, {"length", m.length}};
}

nlohmann::json to_json(const ScriptureRef& r) {
  nlohmann::json j = {{"book", r.book},
                      {"chapter", r.chapter},
                      {"verse_start", r.verse_start},
                      {"offset", r.offset},
                      {"length", r.length}};
  j["verse_end"] = r.verse_end ? nlohmann::json(*r.verse_end) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json to_json(const SimplicityMetrics& m) {
  return {{"mean_sentence_length_words", m.mean_sentence_length_words},
          {"mean_word_length_chars", m.mean_word_length_chars},
          {"long_word_ratio", m.long_word_ratio},
          {"sentences", m.sentences},
          {"words", m.words},
          {"empty", m.empty}};
}

}  // namespace karabo::evaluation
