#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "karabo/evaluation/scoring.hpp"

namespace karabo::evaluation {

struct AggregateRow {
  std::string label;
  DimensionScores means{};
};

struct AggregateTable {
  std::vector<AggregateRow> rows;
  /// Column means of the rows above.
  AggregateRow overall{"overall", {}};

  /// Header `case,naturalness,understandability,coherence`, four decimals.
  std::string to_csv(bool include_overall = true) const;
  nlohmann::json to_json() const;
};

/// One row per report, labeled by conversation id, plus the overall row.
AggregateTable aggregate(const std::vector<ConversationReport>& reports, bool exclude_first_turn = false);

/// Builds a table from preset rows, computing the overall row.
AggregateTable make_table(std::vector<AggregateRow> rows);

}  // namespace karabo::evaluation
