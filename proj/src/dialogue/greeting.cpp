#include "karabo/dialogue/greeting.hpp"

#include "karabo/error.hpp"
#include "karabo/text.hpp"

namespace karabo::dialogue {

namespace {
std::string key_of(std::string_view s) { return text::case_fold(text::trim(s)); }
}  // namespace

GreetingTable GreetingTable::defaults() {
  GreetingTable t;
  t.set("english", "Hi, I'm Karabo");
  t.set("setswana", "Dumela, kenna Karabo");
  t.set("isizulu", "Sawubona, nginguKarabo");
  t.alias("en", "english");
  t.alias("tn", "setswana");
  t.alias("tswana", "setswana");
  t.alias("zu", "isizulu");
  t.alias("zulu", "isizulu");
  t.set_default_language("english");
  return t;
}

void GreetingTable::set(std::string language, std::string greeting) {
  auto k = key_of(language);
  if (k.empty() || text::trim(greeting).empty())
    throw Error(ErrorCode::Config, "greeting language and text must be non-empty");
  greetings_[k] = std::move(greeting);
}

void GreetingTable::alias(std::string alias, std::string language) {
  aliases_[key_of(alias)] = key_of(language);
}

void GreetingTable::set_default_language(std::string language) {
  auto k = key_of(language);
  if (!greetings_.count(k)) throw Error(ErrorCode::Config, "default language '" + language + "' has no greeting");
  default_language_ = k;
}

std::string GreetingTable::resolve(std::string_view language) const {
  auto k = key_of(language);
  if (greetings_.count(k)) return k;
  auto it = aliases_.find(k);
  if (it != aliases_.end() && greetings_.count(it->second)) return it->second;
  return "";
}

GreetingResult GreetingTable::greeting(std::string_view language) const {
  auto lang = resolve(language);
  if (!lang.empty()) return {greetings_.at(lang), lang, false};
  return {greetings_.at(default_language_), default_language_, true};
}

GreetingTable GreetingTable::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("greetings") || !j.at("greetings").is_object())
    throw Error(ErrorCode::Schema, "greeting table needs a 'greetings' object");
  GreetingTable t;
  for (const auto& [lang, text] : j.at("greetings").items()) t.set(lang, text.get<std::string>());
  if (j.contains("aliases")) {
    for (const auto& [a, lang] : j.at("aliases").items()) t.alias(a, lang.get<std::string>());
  }
  if (t.greetings_.empty()) throw Error(ErrorCode::Config, "greeting table is empty");
  std::string def = j.value("default_language", "english");
  if (!t.greetings_.count(key_of(def))) def = t.greetings_.begin()->first;
  t.set_default_language(def);
  return t;
}

nlohmann::json GreetingTable::to_json() const {
  return {{"default_language", default_language_}, {"greetings", greetings_}, {"aliases", aliases_}};
}

}  // namespace karabo::dialogue
