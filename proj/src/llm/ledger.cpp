#include "karabo/llm/ledger.hpp"

namespace karabo::llm {

StageUsage& StageUsage::operator+=(const StageUsage& o) {
  calls += o.calls;
  attempts += o.attempts;
  prompt_tokens += o.prompt_tokens;
  completion_tokens += o.completion_tokens;
  wall_time += o.wall_time;
  return *this;
}

void UsageLedger::record(const std::string& stage, const StageUsage& delta) {
  std::lock_guard lock(mu_);
  stages_[stage] += delta;
}

std::map<std::string, StageUsage> UsageLedger::snapshot() const {
  std::lock_guard lock(mu_);
  return stages_;
}

StageUsage UsageLedger::stage(const std::string& name) const {
  std::lock_guard lock(mu_);
  const auto it = stages_.find(name);
  return it == stages_.end() ? StageUsage{} : it->second;
}

StageUsage UsageLedger::totals() const {
  std::lock_guard lock(mu_);
  StageUsage t;
  for (const auto& [_, u] : stages_) t += u;
  return t;
}

void UsageLedger::reset() {
  std::lock_guard lock(mu_);
  stages_.clear();
}

nlohmann::json UsageLedger::to_json() const {
  auto usage_json = [](const StageUsage& u) {
    return nlohmann::json{{"calls", u.calls},
                          {"attempts", u.attempts},
                          {"prompt_tokens", u.prompt_tokens},
                          {"completion_tokens", u.completion_tokens},
                          {"wall_time_ms", std::chrono::duration<double, std::milli>(u.wall_time).count()}};
  };
  nlohmann::json stages = nlohmann::json::object();
  StageUsage total;
  {
    std::lock_guard lock(mu_);
    for (const auto& [name, u] : stages_) {
      stages[name] = usage_json(u);
      total += u;
    }
  }
  return nlohmann::json{{"stages", std::move(stages)}, {"total", usage_json(total)}};
}

}  // namespace karabo::llm
