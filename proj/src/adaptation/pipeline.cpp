#include "karabo/adaptation/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <ostream>
#include <thread>

#include "karabo/error.hpp"

namespace karabo::adaptation {

std::pair<corpus::TurnInstance, AdaptationTrace> adapt_instance(const corpus::TurnInstance& instance,
                                                                const AdaptationConfig& config,
                                                                llm::Gateway& gateway,
                                                                const ProverbRegistry& registry) {
  AdaptationTrace trace;
  trace.instance_id = instance.instance_id();
  corpus::TurnInstance current = instance;

  auto take = [&](StageResult r) {
    current = std::move(r.instance);
    trace.stages.push_back(std::move(r.entry));
  };

  take(inject_ubuntu(current, config, gateway));
  take(simplify_language(current, config, gateway));
  take(remove_clinical_terms(current, config, gateway));
  {
    auto rng = RandomStream::for_instance(config.rng_seed, trace.instance_id, Stage::Faith);
    take(integrate_faith(current, config, gateway, rng));
  }
  {
    auto rng = RandomStream::for_instance(config.rng_seed, trace.instance_id, Stage::Proverb);
    take(integrate_proverb(current, config, gateway, rng, registry));
  }
  return {std::move(current), std::move(trace)};
}

PipelineResult run_pipeline(std::span<const corpus::TurnInstance> instances,
                            const AdaptationConfig& config, llm::Gateway& gateway,
                            const ProverbRegistry& registry, const PipelineOptions& options) {
  config.validate();
  if (config.enabled(Stage::Proverb) && registry.empty()) {
    throw Error(ErrorCode::Config, "proverb stage enabled with an empty registry");
  }

  PipelineResult result;
  const std::size_t n = instances.size();
  result.adapted.resize(n);
  result.traces.resize(n);

  std::atomic<std::size_t> next{0};
  std::mutex progress_mu;
  MonitorStats running;
  std::size_t finished = 0;

  std::exception_ptr failure;
  std::mutex failure_mu;

  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      std::pair<corpus::TurnInstance, AdaptationTrace> out;
      try {
        out = adapt_instance(instances[i], config, gateway, registry);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next.store(n);
        return;
      }
      auto& [adapted, trace] = out;
      if (options.on_progress) {
        std::lock_guard lock(progress_mu);
        running.add(trace);
        ++finished;
        if (options.progress_interval && (finished % options.progress_interval == 0 || finished == n)) {
          options.on_progress(running);
        }
      }
      result.adapted[i] = std::move(adapted);
      result.traces[i] = std::move(trace);
    }
  };

  const std::size_t workers = std::max<std::size_t>(1, std::min(options.workers, std::max<std::size_t>(n, 1)));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  if (failure) std::rethrow_exception(failure);

  result.stats = MonitorStats::from_traces(result.traces);
  for (const auto& t : result.traces) {
    for (const auto& e : t.stages) {
      if (e.error) result.errors.push_back({t.instance_id, e.stage, *e.error});
    }
  }
  return result;
}

void write_traces(std::ostream& out, std::span<const AdaptationTrace> traces) {
  for (const auto& t : traces) out << to_json(t).dump() << '\n';
}

}  // namespace karabo::adaptation
