#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "karabo/adaptation/config.hpp"

namespace karabo::adaptation {

struct ProverbAttempt {
  std::size_t index = 0;  // 1-based registry index
  bool suitable = false;

  bool operator==(const ProverbAttempt&) const = default;
};

/// Audit of one stage on one instance. `applied` holds exactly when the
/// counselor text digest changed.
struct StageEntry {
  Stage stage = Stage::Ubuntu;
  bool enabled = true;
  std::optional<bool> judge_decision;
  /// Recorded only when the judge said yes.
  std::optional<double> gate_draw;
  bool gated_in = false;
  bool applied = false;
  std::vector<ProverbAttempt> proverb_attempts;
  std::string before_hash;
  std::string after_hash;
  std::optional<std::string> error;
  std::vector<std::string> warnings;

  bool operator==(const StageEntry&) const = default;
};

struct AdaptationTrace {
  std::string instance_id;
  std::vector<StageEntry> stages;

  bool operator==(const AdaptationTrace&) const = default;
};

struct StageCounts {
  std::size_t eligible = 0;
  std::size_t judged_yes = 0;
  std::size_t gated_in = 0;
  std::size_t applied = 0;
  std::size_t errors = 0;

  double applied_fraction() const {
    return eligible ? static_cast<double>(applied) / static_cast<double>(eligible) : 0.0;
  }
  bool operator==(const StageCounts&) const = default;
};

/// Per-stage counters; applied <= gated_in <= judged_yes <= eligible.
struct MonitorStats {
  std::size_t instances = 0;
  std::array<StageCounts, 5> stages{};

  void add(const AdaptationTrace& trace);
  static MonitorStats from_traces(std::span<const AdaptationTrace> traces);

  const StageCounts& operator[](Stage s) const { return stages[index_of(s)]; }
  bool operator==(const MonitorStats&) const = default;

  nlohmann::json to_json() const;
};

nlohmann::json to_json(const StageEntry& entry);
nlohmann::json to_json(const AdaptationTrace& trace);
AdaptationTrace trace_from_json(const nlohmann::json& j);

}  // namespace karabo::adaptation
