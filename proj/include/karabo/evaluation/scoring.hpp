#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "karabo/dialogue/conversation.hpp"
#include "karabo/llm/gateway.hpp"

namespace karabo::evaluation {

enum class Dimension { Naturalness, Understandability, Coherence };

inline constexpr std::array<Dimension, 3> kDimensions = {Dimension::Naturalness, Dimension::Understandability,
                                                         Dimension::Coherence};

std::string_view to_string(Dimension d);
Dimension dimension_from_string(std::string_view s);

using DimensionScores = std::array<double, 3>;

/// One boolean question per dimension.
class DimensionQuestions {
 public:
  static DimensionQuestions defaults();

  /// `[{"dimension": "...", "question": "..."}, ...]` or an object keyed by
  /// dimension. Every dimension must appear exactly once (E_CONFIG).
  static DimensionQuestions from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  const std::string& question(Dimension d) const { return questions_[static_cast<int>(d)]; }

 private:
  std::array<std::string, 3> questions_;
};

/// p_yes / (p_yes + p_no). Throws E_DEGENERATE when both are zero and
/// E_RANGE for negative or non-finite probabilities.
double score_turn(const llm::BooleanVerdict& verdict);
double score_turn(std::string_view context, std::string_view response, const llm::BooleanVerdict& verdict);

struct TurnScore {
  /// 0-based among assistant messages.
  std::size_t turn_index = 0;
  /// Position of the scored message in the conversation.
  std::size_t message_index = 0;
  DimensionScores scores{};
  bool low_context_flag = false;
};

struct ConversationReport {
  std::string conversation_id;
  std::vector<TurnScore> turns;
  DimensionScores means{};
  /// Assistant turns in the conversation; exceeds turns.size() when incomplete.
  std::size_t expected_turns = 0;
  bool incomplete = false;
  std::optional<std::string> error;

  double mean(Dimension d) const { return means[static_cast<int>(d)]; }

  /// Column means over `turns`, optionally skipping low-context turns. When
  /// skipping would leave nothing, every turn is used.
  DimensionScores column_means(bool exclude_first_turn) const;
};

nlohmann::json to_json(const ConversationReport& report);
/// Throws E_SCHEMA on malformed input.
ConversationReport report_from_json(const nlohmann::json& j);

/// Speaker-labeled transcript of the answered messages strictly before
/// `message_index`.
std::string build_context(const dialogue::Conversation& conversation, std::size_t message_index);

struct EvaluateOptions {
  /// Issue the three judge calls of a turn concurrently.
  bool parallel_dimensions = false;
};

/// Scores every assistant message on the three dimensions. Requires at
/// least one assistant message (E_EMPTY_INPUT). A gateway failure stops the
/// run and returns the turns scored so far with `incomplete` set.
ConversationReport evaluate_conversation(const dialogue::Conversation& conversation,
                                         const DimensionQuestions& questions, llm::Gateway& gateway,
                                         const EvaluateOptions& options = {});

/// Runs evaluate_conversation over many conversations on `workers` threads.
/// Output order follows input order.
std::vector<ConversationReport> evaluate_all(const std::vector<dialogue::Conversation>& conversations,
                                             const DimensionQuestions& questions, llm::Gateway& gateway,
                                             std::size_t workers = 1, const EvaluateOptions& options = {});

/// Reads conversations from a file holding one conversation object, an
/// array of them, JSONL of conversation objects, or JSONL of
/// `{"role", "text"}` messages forming a single transcript.
std::vector<dialogue::Conversation> load_conversations(const std::filesystem::path& path);

}  // namespace karabo::evaluation
