#include "karabo/evaluation/aggregate.hpp"

#include <cstdio>

namespace karabo::evaluation {

namespace {

std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

AggregateTable make_table(std::vector<AggregateRow> rows) {
  AggregateTable t;
  t.rows = std::move(rows);
  if (t.rows.empty()) return t;
  for (const auto& r : t.rows)
    for (int d = 0; d < 3; ++d) t.overall.means[d] += r.means[d];
  for (auto& m : t.overall.means) m /= static_cast<double>(t.rows.size());
  return t;
}

AggregateTable aggregate(const std::vector<ConversationReport>& reports, bool exclude_first_turn) {
  std::vector<AggregateRow> rows;
  rows.reserve(reports.size());
  for (const auto& r : reports)
    rows.push_back({r.conversation_id, exclude_first_turn ? r.column_means(true) : r.means});
  return make_table(std::move(rows));
}

std::string AggregateTable::to_csv(bool include_overall) const {
  std::string out = "case,naturalness,understandability,coherence\n";
  auto put = [&](const AggregateRow& r) {
    out += csv_field(r.label);
    for (double m : r.means) out += "," + fixed4(m);
    out += '\n';
  };
  for (const auto& r : rows) put(r);
  if (include_overall && !rows.empty()) put(overall);
  return out;
}

nlohmann::json AggregateTable::to_json() const {
  auto row_json = [](const AggregateRow& r) {
    nlohmann::json j = {{"case", r.label}};
    for (auto d : kDimensions) j[std::string(to_string(d))] = r.means[static_cast<int>(d)];
    return j;
  };
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows) arr.push_back(row_json(r));
  return {{"rows", arr}, {"overall", row_json(overall)}};
}

}  // namespace karabo::evaluation
