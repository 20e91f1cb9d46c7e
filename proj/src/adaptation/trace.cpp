#include "karabo/adaptation/trace.hpp"

#include "karabo/error.hpp"

namespace karabo::adaptation {

using nlohmann::json;

void MonitorStats::add(const AdaptationTrace& trace) {
  ++instances;
  for (const auto& e : trace.stages) {
    if (!e.enabled) continue;
    auto& c = stages[index_of(e.stage)];
    ++c.eligible;
    if (e.error) ++c.errors;
    const bool judged = e.stage == Stage::Faith || e.stage == Stage::Proverb;
    if (judged ? e.judge_decision.value_or(false) : !e.error.has_value()) ++c.judged_yes;
    if (e.gated_in) ++c.gated_in;
    if (e.applied) ++c.applied;
  }
}

MonitorStats MonitorStats::from_traces(std::span<const AdaptationTrace> traces) {
  MonitorStats s;
  for (const auto& t : traces) s.add(t);
  return s;
}

json MonitorStats::to_json() const {
  json per_stage = json::object();
  for (Stage s : kStages) {
    const auto& c = stages[index_of(s)];
    per_stage[std::string(adaptation::to_string(s))] = {{"eligible", c.eligible},
                                                       {"judged_yes", c.judged_yes},
                                                       {"gated_in", c.gated_in},
                                                       {"applied", c.applied},
                                                       {"errors", c.errors},
                                                       {"applied_fraction", c.applied_fraction()}};
  }
  return json{{"instances", instances}, {"stages", std::move(per_stage)}};
}

json to_json(const StageEntry& e) {
  json j{{"stage", to_string(e.stage)},
         {"enabled", e.enabled},
         {"applied", e.applied},
         {"gated_in", e.gated_in},
         {"before_hash", e.before_hash},
         {"after_hash", e.after_hash}};
  j["judge_decision"] = e.judge_decision ? json(*e.judge_decision) : json(nullptr);
  j["gate_draw"] = e.gate_draw ? json(*e.gate_draw) : json(nullptr);
  json attempts = json::array();
  for (const auto& a : e.proverb_attempts) attempts.push_back({{"index", a.index}, {"suitable", a.suitable}});
  j["proverb_attempts"] = std::move(attempts);
  j["error"] = e.error ? json(*e.error) : json(nullptr);
  j["warnings"] = e.warnings;
  return j;
}

json to_json(const AdaptationTrace& t) {
  json stages = json::array();
  for (const auto& e : t.stages) stages.push_back(to_json(e));
  return json{{"instance_id", t.instance_id}, {"stages", std::move(stages)}};
}

AdaptationTrace trace_from_json(const json& j) {
  AdaptationTrace t;
  try {
    t.instance_id = j.at("instance_id").get<std::string>();
    for (const auto& s : j.at("stages")) {
      StageEntry e;
      const auto stage = stage_from_string(s.at("stage").get<std::string>());
      if (!stage) throw Error(ErrorCode::Schema, "unknown stage in trace");
      e.stage = *stage;
      e.enabled = s.at("enabled").get<bool>();
      e.applied = s.at("applied").get<bool>();
      e.gated_in = s.value("gated_in", false);
      e.before_hash = s.at("before_hash").get<std::string>();
      e.after_hash = s.at("after_hash").get<std::string>();
      if (!s.at("judge_decision").is_null()) e.judge_decision = s.at("judge_decision").get<bool>();
      if (!s.at("gate_draw").is_null()) e.gate_draw = s.at("gate_draw").get<double>();
      for (const auto& a : s.at("proverb_attempts")) {
        e.proverb_attempts.push_back({a.at("index").get<std::size_t>(), a.at("suitable").get<bool>()});
      }
      if (!s.at("error").is_null()) e.error = s.at("error").get<std::string>();
      e.warnings = s.value("warnings", std::vector<std::string>{});
      t.stages.push_back(std::move(e));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Schema, std::string("bad trace: ") + e.what());
  }
  return t;
}

}  // namespace karabo::adaptation
