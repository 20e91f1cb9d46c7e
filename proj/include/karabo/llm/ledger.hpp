#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <mutex>
#include <string>

#include <nlohmann/json.hpp>

namespace karabo::llm {

struct StageUsage {
  std::uint64_t calls = 0;
  std::uint64_t attempts = 0;
  std::uint64_t prompt_tokens = 0;
  std::uint64_t completion_tokens = 0;
  std::chrono::nanoseconds wall_time{0};

  StageUsage& operator+=(const StageUsage& o);
};

/// Per-stage usage tallies. Updates are atomic with respect to each other;
/// totals are always the sum over stages.
class UsageLedger {
 public:
  void record(const std::string& stage, const StageUsage& delta);

  std::map<std::string, StageUsage> snapshot() const;
  StageUsage stage(const std::string& name) const;
  StageUsage totals() const;
  void reset();

  nlohmann::json to_json() const;

 private:
  mutable std::mutex mu_;
  std::map<std::string, StageUsage> stages_;
};

}  // namespace karabo::llm
