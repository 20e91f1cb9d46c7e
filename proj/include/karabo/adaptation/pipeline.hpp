#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "karabo/adaptation/stages.hpp"

namespace karabo::adaptation {

struct InstanceError {
  std::string instance_id;
  Stage stage = Stage::Ubuntu;
  std::string message;
};

struct PipelineOptions {
  std::size_t workers = 1;
  /// Called with running stats every `progress_interval` finished
  /// instances, in completion order. Calls are serialized.
  std::function<void(const MonitorStats&)> on_progress;
  std::size_t progress_interval = 100;
};

struct PipelineResult {
  std::vector<corpus::TurnInstance> adapted;
  std::vector<AdaptationTrace> traces;
  MonitorStats stats;
  std::vector<InstanceError> errors;
};

/// Runs the enabled stages in order ubuntu, simplify, declinical, faith,
/// proverb on every instance. Output order equals input order and is
/// independent of the worker count. Throws only on configuration errors.
PipelineResult run_pipeline(std::span<const corpus::TurnInstance> instances,
                            const AdaptationConfig& config, llm::Gateway& gateway,
                            const ProverbRegistry& registry, const PipelineOptions& options = {});

/// Single instance through all stages; what each worker runs.
std::pair<corpus::TurnInstance, AdaptationTrace> adapt_instance(const corpus::TurnInstance& instance,
                                                                const AdaptationConfig& config,
                                                                llm::Gateway& gateway,
                                                                const ProverbRegistry& registry);

void write_traces(std::ostream& out, std::span<const AdaptationTrace> traces);

}  // namespace karabo::adaptation
