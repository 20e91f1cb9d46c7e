#pragma once

#include <map>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace karabo::dialogue {

struct GreetingResult {
  std::string text;
  /// Canonical language actually used.
  std::string language;
  /// True when the requested language was unknown and the default was used.
  bool fallback = false;
};

/// Static greeting list. Lookups are case-insensitive and accept aliases
/// such as "tn" for "setswana".
class GreetingTable {
 public:
  /// english, setswana, isizulu.
  static GreetingTable defaults();

  static GreetingTable from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  GreetingResult greeting(std::string_view language) const;

  /// Canonical name for a language or alias, or "" when unknown.
  std::string resolve(std::string_view language) const;

  void set(std::string language, std::string greeting);
  void alias(std::string alias, std::string language);
  void set_default_language(std::string language);

  const std::string& default_language() const { return default_language_; }
  const std::map<std::string, std::string>& greetings() const { return greetings_; }

 private:
  std::string default_language_ = "english";
  std::map<std::string, std::string> greetings_;
  std::map<std::string, std::string> aliases_;
};

}  // namespace karabo::dialogue
