#include "karabo/corpus/corpus.hpp"

#include <istream>
#include <ostream>

#include "karabo/error.hpp"
#include "karabo/text.hpp"

namespace karabo::corpus {

using nlohmann::json;

std::string_view to_string(Speaker s) {
  return s == Speaker::Client ? "client" : "counselor";
}

std::string_view to_string(TechniqueClass c) { return c == TechniqueClass::BA ? "BA" : "CR"; }

TechniqueClass technique_class_from_string(std::string_view s) {
  if (s == "BA") return TechniqueClass::BA;
  if (s == "CR") return TechniqueClass::CR;
  throw Error(ErrorCode::Schema, "unknown technique class '" + std::string(s) + "'");
}

std::string TurnInstance::instance_id() const {
  return source_id + "#" + std::to_string(pair_index);
}

// --- whitelist ---------------------------------------------------------------

std::string TechniqueWhitelist::normalize(std::string_view label) {
  return text::case_fold(text::trim(label));
}

TechniqueWhitelist::TechniqueWhitelist(std::vector<std::string> ba_labels,
                                       std::vector<std::string> cr_labels)
    : ba_labels_(std::move(ba_labels)), cr_labels_(std::move(cr_labels)) {
  for (const auto& l : ba_labels_) ba_.insert(normalize(l));
  for (const auto& l : cr_labels_) {
    auto n = normalize(l);
    if (ba_.count(n)) {
      throw Error(ErrorCode::Config, "technique label '" + l + "' is listed as both BA and CR");
    }
    cr_.insert(std::move(n));
  }
}

TechniqueWhitelist TechniqueWhitelist::defaults() {
  return TechniqueWhitelist({"Behavioural Experiment", "Activity Scheduling", "Systematic Exposure"},
                            {"Reality Testing", "Reframing", "Positive Reframing"});
}

TechniqueWhitelist TechniqueWhitelist::from_json(const json& j) {
  if (!j.is_object() || !j.contains("ba") || !j.contains("cr")) {
    throw Error(ErrorCode::Config, "whitelist must be an object with 'ba' and 'cr' arrays");
  }
  return TechniqueWhitelist(j.at("ba").get<std::vector<std::string>>(),
                            j.at("cr").get<std::vector<std::string>>());
}

json TechniqueWhitelist::to_json() const { return json{{"ba", ba_labels_}, {"cr", cr_labels_}}; }

std::optional<TechniqueClass> TechniqueWhitelist::classify(std::string_view label) const {
  const auto n = normalize(label);
  if (ba_.count(n)) return TechniqueClass::BA;
  if (cr_.count(n)) return TechniqueClass::CR;
  return std::nullopt;
}

// --- parsing -----------------------------------------------------------------

namespace {

constexpr const char* kRequiredFields[] = {"attitude",      "thought",  "dialogue",
                                           "cbt_technique", "patterns", "intake_form",
                                           "cbt_plan"};

bool starts_with_ci(std::string_view s, std::string_view prefix) {
  if (prefix.empty() || s.size() < prefix.size()) return false;
  return text::ascii_lower(s.substr(0, prefix.size())) == text::ascii_lower(prefix);
}

Speaker speaker_from_tag(std::string_view tag) {
  const auto t = text::ascii_lower(text::trim(tag));
  if (t == "client") return Speaker::Client;
  if (t == "counselor") return Speaker::Counselor;
  throw Error(ErrorCode::Schema, "unknown speaker tag '" + std::string(tag) + "'");
}

void push_turn(std::vector<Turn>& turns, Speaker speaker, std::string text) {
  if (!turns.empty() && turns.back().speaker == speaker) {
    turns.back().text += "\n";
    turns.back().text += text;
  } else {
    turns.push_back(Turn{speaker, std::move(text)});
  }
}

std::vector<Turn> parse_transcript(std::string_view transcript, const ParseOptions& options) {
  struct Pending {
    Speaker speaker;
    std::string text;
  };
  std::vector<Pending> raw;
  for (const auto& line : text::split(transcript, '\n')) {
    const auto t = text::trim(line);
    if (t.empty()) continue;
    if (starts_with_ci(t, options.client_prefix)) {
      raw.push_back({Speaker::Client, text::trim(std::string_view(t).substr(options.client_prefix.size()))});
    } else if (starts_with_ci(t, options.counselor_prefix)) {
      raw.push_back(
          {Speaker::Counselor, text::trim(std::string_view(t).substr(options.counselor_prefix.size()))});
    } else if (raw.empty()) {
      throw Error(ErrorCode::Schema, "transcript line without a known speaker prefix: '" + t + "'");
    } else {
      if (!raw.back().text.empty()) raw.back().text += "\n";
      raw.back().text += t;
    }
  }
  std::vector<Turn> turns;
  for (auto& p : raw) {
    if (p.text.empty()) throw Error(ErrorCode::Schema, "dialogue turn has empty text");
    push_turn(turns, p.speaker, std::move(p.text));
  }
  return turns;
}

const json* find_any(const json& obj, std::initializer_list<const char*> keys) {
  for (const char* k : keys) {
    if (auto it = obj.find(k); it != obj.end()) return &*it;
  }
  return nullptr;
}

}  // namespace

std::vector<Turn> parse_dialogue(const json& dialogue, const ParseOptions& options) {
  std::vector<Turn> turns;
  if (dialogue.is_string()) {
    turns = parse_transcript(dialogue.get_ref<const std::string&>(), options);
  } else if (dialogue.is_array()) {
    for (const auto& item : dialogue) {
      if (item.is_string()) {
        for (auto& t : parse_transcript(item.get_ref<const std::string&>(), options)) {
          push_turn(turns, t.speaker, std::move(t.text));
        }
        continue;
      }
      if (!item.is_object()) throw Error(ErrorCode::Schema, "dialogue turn must be an object or string");
      const json* tag = find_any(item, {"speaker", "role"});
      const json* body = find_any(item, {"text", "content", "utterance"});
      if (!tag || !tag->is_string()) throw Error(ErrorCode::Schema, "dialogue turn lacks a speaker");
      if (!body || !body->is_string()) throw Error(ErrorCode::Schema, "dialogue turn lacks text");
      const auto speaker = speaker_from_tag(tag->get_ref<const std::string&>());
      auto t = text::trim(body->get_ref<const std::string&>());
      if (t.empty()) throw Error(ErrorCode::Schema, "dialogue turn has empty text");
      push_turn(turns, speaker, std::move(t));
    }
  } else {
    throw Error(ErrorCode::Schema, "dialogue must be a string or an array");
  }
  if (turns.empty()) throw Error(ErrorCode::Schema, "dialogue is empty");
  return turns;
}

SessionRecord parse_record(const json& j, std::size_t line, const ParseOptions& options) {
  if (!j.is_object()) throw Error(ErrorCode::Schema, "record is not a JSON object");
  for (const char* field : kRequiredFields) {
    if (!j.contains(field) || j.at(field).is_null()) {
      throw Error(ErrorCode::Schema, std::string("missing required field '") + field + "'");
    }
  }
  auto str = [&](const char* field) -> std::string {
    const auto& v = j.at(field);
    if (!v.is_string()) throw Error(ErrorCode::Schema, std::string("field '") + field + "' must be a string");
    return v.get<std::string>();
  };

  SessionRecord r;
  if (auto it = j.find("id"); it != j.end() && !it->is_null()) {
    if (it->is_string()) {
      r.id = it->get<std::string>();
    } else if (it->is_number_integer()) {
      r.id = std::to_string(it->get<long long>());
    } else {
      throw Error(ErrorCode::Schema, "field 'id' must be a string or integer");
    }
    if (text::trim(r.id).empty()) throw Error(ErrorCode::Schema, "field 'id' is empty");
  } else {
    r.id = "row-" + std::to_string(line);
  }
  r.attitude = str("attitude");
  r.thought = str("thought");
  r.dialogue = parse_dialogue(j.at("dialogue"), options);
  r.cbt_technique = str("cbt_technique");
  if (text::trim(r.cbt_technique).empty()) {
    throw Error(ErrorCode::Schema, "required field 'cbt_technique' is empty");
  }
  r.patterns = str("patterns");
  r.intake_form = str("intake_form");
  r.cbt_plan = str("cbt_plan");
  return r;
}

ParseResult parse_corpus(std::istream& in, const ParseOptions& options) {
  ParseResult result;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    try {
      json j;
      try {
        j = json::parse(line);
      } catch (const json::parse_error& e) {
        throw Error(ErrorCode::Schema, std::string("malformed JSON: ") + e.what());
      }
      result.records.push_back(parse_record(j, line_no, options));
    } catch (const Error& e) {
      if (options.mode == ErrorMode::FailFast) {
        throw Error(ErrorCode::Schema, "line " + std::to_string(line_no) + ": " + e.what());
      }
      result.issues.push_back({line_no, e.what()});
    }
  }
  return result;
}

std::string serialize_record(const SessionRecord& r) {
  json dialogue = json::array();
  for (const auto& t : r.dialogue) {
    dialogue.push_back(json{{"speaker", to_string(t.speaker)}, {"text", t.text}});
  }
  // nlohmann orders object keys, which makes this the canonical form.
  json j{{"id", r.id},
         {"attitude", r.attitude},
         {"thought", r.thought},
         {"dialogue", std::move(dialogue)},
         {"cbt_technique", r.cbt_technique},
         {"patterns", r.patterns},
         {"intake_form", r.intake_form},
         {"cbt_plan", r.cbt_plan}};
  return j.dump();
}

void write_corpus(std::ostream& out, std::span<const SessionRecord> records) {
  for (const auto& r : records) out << serialize_record(r) << '\n';
}

// --- filtering and segmentation ---------------------------------------------

FilterResult filter_by_technique(std::span<const SessionRecord> records,
                                 const TechniqueWhitelist& whitelist) {
  FilterResult result;
  for (const auto& r : records) {
    if (whitelist.contains(r.cbt_technique)) {
      result.records.push_back(r);
    } else {
      ++result.dropped;
    }
  }
  return result;
}

std::vector<TurnInstance> segment_single_turn(const SessionRecord& record,
                                              const TechniqueWhitelist& whitelist) {
  std::vector<TurnInstance> out;
  const auto cls = whitelist.classify(record.cbt_technique);
  if (!cls) return out;

  // Re-merge in case the record was built by hand with adjacent same-speaker turns.
  std::vector<Turn> turns;
  for (const auto& t : record.dialogue) push_turn(turns, t.speaker, t.text);

  std::size_t pair = 0;
  for (std::size_t i = 0; i + 1 < turns.size(); ++i) {
    if (turns[i].speaker == Speaker::Client && turns[i + 1].speaker == Speaker::Counselor) {
      TurnInstance inst;
      inst.source_id = record.id;
      inst.pair_index = pair++;
      inst.client_text = turns[i].text;
      inst.counselor_text = turns[i + 1].text;
      inst.technique_class = *cls;
      inst.technique_label = record.cbt_technique;
      out.push_back(std::move(inst));
    }
  }
  return out;
}

BalanceReport balance_report(std::span<const TurnInstance> instances, std::size_t slack) {
  BalanceReport r;
  for (const auto& i : instances) {
    if (i.technique_class == TechniqueClass::BA) {
      ++r.ba;
    } else {
      ++r.cr;
    }
  }
  r.total = r.ba + r.cr;
  const auto diff = r.ba > r.cr ? r.ba - r.cr : r.cr - r.ba;
  r.balanced = diff <= slack;
  return r;
}

// --- instance I/O ------------------------------------------------------------

json to_json(const TurnInstance& i) {
  return json{{"instance_id", i.instance_id()},
              {"source_id", i.source_id},
              {"pair_index", i.pair_index},
              {"client_text", i.client_text},
              {"counselor_text", i.counselor_text},
              {"technique_class", to_string(i.technique_class)},
              {"technique_label", i.technique_label}};
}

TurnInstance turn_instance_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::Schema, "instance is not a JSON object");
  TurnInstance i;
  try {
    i.source_id = j.at("source_id").get<std::string>();
    i.pair_index = j.at("pair_index").get<std::size_t>();
    i.client_text = j.at("client_text").get<std::string>();
    i.counselor_text = j.at("counselor_text").get<std::string>();
    i.technique_class = technique_class_from_string(j.at("technique_class").get<std::string>());
    i.technique_label = j.at("technique_label").get<std::string>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Schema, std::string("bad instance: ") + e.what());
  }
  if (i.client_text.empty() || i.counselor_text.empty()) {
    throw Error(ErrorCode::Schema, "instance texts must be non-empty");
  }
  return i;
}

json to_json(const BalanceReport& r) {
  return json{{"BA", r.ba}, {"CR", r.cr}, {"total", r.total}, {"balanced", r.balanced}};
}

std::vector<TurnInstance> read_instances(std::istream& in) {
  std::vector<TurnInstance> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    try {
      out.push_back(turn_instance_from_json(json::parse(line)));
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::Schema, "line " + std::to_string(line_no) + ": malformed JSON: " + e.what());
    } catch (const Error& e) {
      throw Error(ErrorCode::Schema, "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

void write_instances(std::ostream& out, std::span<const TurnInstance> instances) {
  for (const auto& i : instances) out << to_json(i).dump() << '\n';
}

}  // namespace karabo::corpus
