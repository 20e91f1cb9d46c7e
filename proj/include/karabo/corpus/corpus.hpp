#pragma once

// CACTUS-schema counseling sessions: parsing, technique filtering, and
// single-turn segmentation.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace karabo::corpus {

enum class Speaker { Client, Counselor };

std::string_view to_string(Speaker s);

struct Turn {
  Speaker speaker = Speaker::Client;
  std::string text;

  bool operator==(const Turn&) const = default;
};

struct SessionRecord {
  std::string id;
  std::string attitude;
  std::string thought;
  std::vector<Turn> dialogue;
  std::string cbt_technique;
  std::string patterns;
  std::string intake_form;
  std::string cbt_plan;

  bool operator==(const SessionRecord&) const = default;
};

enum class TechniqueClass { BA, CR };

std::string_view to_string(TechniqueClass c);
TechniqueClass technique_class_from_string(std::string_view s);

struct TurnInstance {
  std::string source_id;
  std::size_t pair_index = 0;
  std::string client_text;
  std::string counselor_text;
  TechniqueClass technique_class = TechniqueClass::BA;
  std::string technique_label;

  /// "{source_id}#{pair_index}"
  std::string instance_id() const;

  bool operator==(const TurnInstance&) const = default;
};

/// Labels retained for behavioural activation and cognitive restructuring.
/// Matching is trim + Unicode case-fold exact match.
class TechniqueWhitelist {
 public:
  TechniqueWhitelist() = default;

  /// Throws E_CONFIG when a label appears in both sets after normalization.
  TechniqueWhitelist(std::vector<std::string> ba_labels, std::vector<std::string> cr_labels);

  /// Behavioural Experiment, Activity Scheduling, Systematic Exposure (BA);
  /// Reality Testing, Reframing, Positive Reframing (CR).
  static TechniqueWhitelist defaults();

  static TechniqueWhitelist from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  std::optional<TechniqueClass> classify(std::string_view label) const;
  bool contains(std::string_view label) const { return classify(label).has_value(); }
  bool empty() const { return ba_.empty() && cr_.empty(); }

  const std::vector<std::string>& ba_labels() const { return ba_labels_; }
  const std::vector<std::string>& cr_labels() const { return cr_labels_; }

  static std::string normalize(std::string_view label);

 private:
  std::vector<std::string> ba_labels_;
  std::vector<std::string> cr_labels_;
  std::set<std::string> ba_;
  std::set<std::string> cr_;
};

enum class ErrorMode { FailFast, SkipAndCollect };

struct ParseOptions {
  ErrorMode mode = ErrorMode::FailFast;
  /// Speaker prefixes recognised in single-string transcripts.
  std::string client_prefix = "Client:";
  std::string counselor_prefix = "Counselor:";
};

struct SchemaIssue {
  std::size_t line = 0;  // 1-based
  std::string message;
};

struct ParseResult {
  std::vector<SessionRecord> records;
  std::vector<SchemaIssue> issues;
};

/// One record per JSONL line. Blank lines are ignored. In FailFast mode the
/// first problem throws E_SCHEMA naming the line; otherwise problems are
/// collected and the offending lines skipped.
ParseResult parse_corpus(std::istream& in, const ParseOptions& options = {});

/// Parses one record object. `line` is used for the auto id and messages.
SessionRecord parse_record(const nlohmann::json& j, std::size_t line,
                           const ParseOptions& options = {});

/// Parses a dialogue field: a turn array or a prefixed transcript string.
/// Adjacent turns by the same speaker are merged with a newline.
std::vector<Turn> parse_dialogue(const nlohmann::json& dialogue, const ParseOptions& options = {});

/// Canonical single-line JSON for a record.
std::string serialize_record(const SessionRecord& record);
void write_corpus(std::ostream& out, std::span<const SessionRecord> records);

struct FilterResult {
  std::vector<SessionRecord> records;
  std::size_t dropped = 0;
};

FilterResult filter_by_technique(std::span<const SessionRecord> records,
                                 const TechniqueWhitelist& whitelist);

/// One instance per client turn immediately followed by a counselor turn.
/// Returns nothing for records whose technique is not whitelisted.
std::vector<TurnInstance> segment_single_turn(const SessionRecord& record,
                                              const TechniqueWhitelist& whitelist);

struct BalanceReport {
  std::size_t ba = 0;
  std::size_t cr = 0;
  std::size_t total = 0;
  bool balanced = true;
};

BalanceReport balance_report(std::span<const TurnInstance> instances, std::size_t slack = 0);

nlohmann::json to_json(const TurnInstance& instance);
TurnInstance turn_instance_from_json(const nlohmann::json& j);
nlohmann::json to_json(const BalanceReport& report);

/// TurnInstance JSONL. Throws E_SCHEMA with the line number on bad input.
std::vector<TurnInstance> read_instances(std::istream& in);
void write_instances(std::ostream& out, std::span<const TurnInstance> instances);

}  // namespace karabo::corpus
