#include "karabo/adaptation/registry.hpp"

#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "karabo/embedded_data.hpp"
#include "karabo/error.hpp"
#include "karabo/text.hpp"

namespace karabo::adaptation {

ProverbRegistry::ProverbRegistry(std::vector<std::string> entries) : entries_(std::move(entries)) {
  std::set<std::string> seen;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (text::trim(entries_[i]).empty()) {
      throw Error(ErrorCode::Config, "proverb " + std::to_string(i + 1) + " is empty");
    }
    if (!seen.insert(text::collapse_whitespace(text::case_fold(entries_[i]))).second) {
      throw Error(ErrorCode::Config, "proverb " + std::to_string(i + 1) + " is a duplicate");
    }
  }
}

ProverbRegistry ProverbRegistry::from_text(std::string_view content) {
  std::vector<std::string> entries;
  std::size_t numbered = 0;
  std::size_t plain = 0;
  for (const auto& raw : text::split(content, '\n')) {
    const auto line = text::trim(raw);
    if (line.empty() || line[0] == '#') continue;

    std::size_t digits = 0;
    while (digits < line.size() && std::isdigit(static_cast<unsigned char>(line[digits]))) ++digits;
    const bool has_number = digits > 0 && digits < line.size() &&
                            (line[digits] == '.' || line[digits] == ')' || line[digits] == ':' ||
                             line[digits] == '\t');
    if (has_number) {
      const auto n = std::stoull(line.substr(0, digits));
      if (n != entries.size() + 1) {
        throw Error(ErrorCode::Config, "proverb numbering is not dense: expected " +
                                           std::to_string(entries.size() + 1) + ", found " +
                                           std::to_string(n));
      }
      entries.push_back(text::trim(std::string_view(line).substr(digits + 1)));
      ++numbered;
    } else {
      entries.push_back(line);
      ++plain;
    }
  }
  if (numbered && plain) throw Error(ErrorCode::Config, "proverb file mixes numbered and plain lines");
  return ProverbRegistry(std::move(entries));
}

ProverbRegistry ProverbRegistry::from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw Error(ErrorCode::Config, "proverb registry JSON must be an array");
  std::vector<std::string> entries;
  for (const auto& e : j) {
    if (!e.is_string()) throw Error(ErrorCode::Config, "proverb entries must be strings");
    entries.push_back(e.get<std::string>());
  }
  return ProverbRegistry(std::move(entries));
}

ProverbRegistry ProverbRegistry::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open proverb registry " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  const auto content = ss.str();
  const auto first = content.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && content[first] == '[') {
    try {
      return from_json(nlohmann::json::parse(content));
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::Config, path.string() + ": " + e.what());
    }
  }
  return from_text(content);
}

ProverbRegistry ProverbRegistry::placeholder() { return from_text(embedded::placeholder_proverbs()); }

const std::string& ProverbRegistry::at(std::size_t index) const {
  if (index < 1 || index > entries_.size()) {
    throw Error(ErrorCode::Range, "proverb index " + std::to_string(index) + " outside 1.." +
                                      std::to_string(entries_.size()));
  }
  return entries_[index - 1];
}

}  // namespace karabo::adaptation
