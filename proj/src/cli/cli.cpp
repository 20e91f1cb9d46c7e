#include "karabo/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "karabo/adaptation/pipeline.hpp"
#include "karabo/corpus/corpus.hpp"
#include "karabo/dialogue/finetune.hpp"
#include "karabo/error.hpp"
#include "karabo/evaluation/aggregate.hpp"
#include "karabo/evaluation/likert.hpp"
#include "karabo/llm/mock.hpp"
#include "karabo/llm/openai.hpp"
#include "karabo/service/replay.hpp"
#include "karabo/service/server.hpp"

namespace karabo::cli {

namespace fs = std::filesystem;

namespace {

struct BackendFlags {
  std::vector<std::string> mocks;
  int max_retries = 3;
  std::size_t max_in_flight = 8;

  void add_to(CLI::App* app) {
    app->add_option("--mock", mocks,
                    "Offline backend: PROFILE or STAGE-PREFIX=PROFILE (echo, identity, yes, no, lower, "
                    "constant:PY,PN, hash[:SEED], append:TEXT, script:FILE, replay:FILE). Repeatable.");
    app->get_option("--mock")->allow_extra_args(false);
    app->add_option("--max-retries", max_retries, "Retries per provider call")->check(CLI::NonNegativeNumber);
    app->add_option("--max-in-flight", max_in_flight, "Concurrent provider calls");
  }

  std::shared_ptr<llm::Gateway> gateway(std::uint64_t seed) const {
    std::shared_ptr<llm::Backend> backend;
    if (!mocks.empty()) {
      backend = llm::make_routed_mock(mocks, seed);
    } else {
      auto cfg = llm::OpenAIConfig::from_env();
      if (cfg.api_key.empty())
        throw Error(ErrorCode::Config, "no --mock given and KARABO_API_KEY/OPENAI_API_KEY is unset");
      backend = std::make_shared<llm::OpenAIBackend>(cfg);
    }
    llm::GatewayOptions opts;
    opts.retry.max_retries = max_retries;
    opts.retry.jitter_seed = seed;
    opts.max_in_flight = max_in_flight;
    return std::make_shared<llm::Gateway>(backend, opts);
  }
};

nlohmann::json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::Schema, path.string() + ": " + e.what());
  }
}

void write_text(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << content;
  if (!out) throw Error(ErrorCode::Io, "write failed: " + path.string());
}

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
  return in;
}

bool looks_like_sessions(const fs::path& path) {
  auto in = open_input(path);
  std::string line;
  while (std::getline(in, line)) {
    if (text::trim(line).empty()) continue;
    try {
      auto j = nlohmann::json::parse(line);
      return j.is_object() && j.contains("dialogue");
    } catch (const nlohmann::json::parse_error&) {
      return false;
    }
  }
  return false;
}

/// Instances from a TurnInstance JSONL file or, for session-record input,
/// the filtered and segmented records.
std::vector<corpus::TurnInstance> load_instances(const fs::path& path, const corpus::TechniqueWhitelist& whitelist) {
  auto in = open_input(path);
  if (!looks_like_sessions(path)) return corpus::read_instances(in);
  auto parsed = corpus::parse_corpus(in);
  std::vector<corpus::TurnInstance> out;
  for (const auto& rec : parsed.records) {
    auto seg = corpus::segment_single_turn(rec, whitelist);
    out.insert(out.end(), seg.begin(), seg.end());
  }
  return out;
}

corpus::TechniqueWhitelist whitelist_from(const std::string& path) {
  return path.empty() ? corpus::TechniqueWhitelist::defaults() : corpus::TechniqueWhitelist::from_json(read_json_file(path));
}

dialogue::DialogueConfig dialogue_config_from(const std::string& path) {
  if (path.empty()) return {};
  auto j = read_json_file(path);
  return j.contains("dialogue") ? dialogue::DialogueConfig::from_json(j.at("dialogue"))
                                : dialogue::DialogueConfig::from_json(j);
}

// preprocess -----------------------------------------------------------------

struct PreprocessCmd {
  std::string input;
  std::string out_dir;
  std::string whitelist;
  bool skip_invalid = false;

  void add(CLI::App& app, std::function<void()>& action, std::ostream& out) {
    auto* sub = app.add_subcommand("preprocess", "Filter a session corpus and segment it into turn instances");
    sub->add_option("input", input, "Session records (JSONL)")->required()->check(CLI::ExistingFile);
    sub->add_option("out_dir", out_dir, "Output directory")->required();
    sub->add_option("--whitelist", whitelist, "Technique whitelist JSON {\"ba\": [...], \"cr\": [...]}");
    sub->add_flag("--skip-invalid", skip_invalid, "Skip malformed records instead of failing");
    sub->callback([this, &action, &out] { action = [this, &out] { run(out); }; });
  }

  void run(std::ostream& out) {
    const auto wl = whitelist_from(whitelist);
    corpus::ParseOptions opts;
    opts.mode = skip_invalid ? corpus::ErrorMode::SkipAndCollect : corpus::ErrorMode::FailFast;
    auto in = open_input(input);
    auto parsed = corpus::parse_corpus(in, opts);
    auto filtered = corpus::filter_by_technique(parsed.records, wl);
    std::vector<corpus::TurnInstance> instances;
    for (const auto& rec : filtered.records) {
      auto seg = corpus::segment_single_turn(rec, wl);
      instances.insert(instances.end(), seg.begin(), seg.end());
    }
    fs::create_directories(out_dir);
    std::ostringstream recs, inst;
    corpus::write_corpus(recs, filtered.records);
    corpus::write_instances(inst, instances);
    write_text(fs::path(out_dir) / "filtered.jsonl", recs.str());
    write_text(fs::path(out_dir) / "instances.jsonl", inst.str());
    const auto balance = corpus::to_json(corpus::balance_report(instances));
    write_text(fs::path(out_dir) / "balance.json", balance.dump(2) + "\n");
    nlohmann::json issues = nlohmann::json::array();
    for (const auto& i : parsed.issues) issues.push_back({{"line", i.line}, {"message", i.message}});
    out << nlohmann::json{{"records", parsed.records.size()},
                          {"retained", filtered.records.size()},
                          {"dropped", filtered.dropped},
                          {"instances", instances.size()},
                          {"balance", balance},
                          {"issues", issues}}
               .dump(2)
        << '\n';
  }
};

// adapt ----------------------------------------------------------------------

struct AdaptCmd {
  std::string input;
  std::string out_dir;
  std::string config;
  std::string registry;
  std::string whitelist;
  std::string stages;
  std::optional<std::uint64_t> seed;
  std::optional<double> faith_threshold;
  std::optional<double> proverb_threshold;
  std::optional<int> max_attempts;
  std::size_t workers = 1;
  std::size_t progress = 0;
  BackendFlags backend;

  void add(CLI::App& app, std::function<void()>& action, std::ostream& out, std::ostream& err) {
    auto* sub = app.add_subcommand("adapt", "Run the cultural adaptation pipeline");
    sub->add_option("input", input, "Turn instances or session records (JSONL)")->required()->check(CLI::ExistingFile);
    sub->add_option("out_dir", out_dir, "Output directory")->required();
    sub->add_option("--config", config, "Adaptation config JSON");
    sub->add_option("--seed", seed, "Random seed for the gates and proverb draws");
    sub->add_option("--faith-threshold", faith_threshold)->check(CLI::Range(0.0, 1.0));
    sub->add_option("--proverb-threshold", proverb_threshold)->check(CLI::Range(0.0, 1.0));
    sub->add_option("--max-attempts", max_attempts, "Proverb draws per instance")->check(CLI::PositiveNumber);
    sub->add_option("--stages", stages, "Comma-separated stages to run, or all/none");
    sub->add_option("--registry", registry, "Proverb registry (numbered text or JSON array)")->check(CLI::ExistingFile);
    sub->add_option("--whitelist", whitelist, "Technique whitelist JSON for session-record input");
    sub->add_option("--workers", workers)->check(CLI::PositiveNumber);
    sub->add_option("--progress", progress, "Print running stats every N instances");
    backend.add_to(sub);
    sub->callback([this, &action, &out, &err] { action = [this, &out, &err] { run(out, err); }; });
  }

  void run(std::ostream& out, std::ostream& err) {
    auto cfg = config.empty() ? adaptation::AdaptationConfig::defaults()
                              : adaptation::AdaptationConfig::from_json(read_json_file(config));
    if (seed) cfg.rng_seed = *seed;
    if (faith_threshold) cfg.faith_threshold = *faith_threshold;
    if (proverb_threshold) cfg.proverb_threshold = *proverb_threshold;
    if (max_attempts) cfg.max_proverb_attempts = *max_attempts;
    if (!stages.empty()) cfg.stage_toggles = adaptation::AdaptationConfig::parse_stage_list(stages);
    cfg.validate();
    const auto reg = registry.empty() ? adaptation::ProverbRegistry::placeholder() : adaptation::ProverbRegistry::load(registry);
    if (registry.empty() && cfg.enabled(adaptation::Stage::Proverb))
      err << "warning: using the placeholder proverb registry\n";

    const auto instances = load_instances(input, whitelist_from(whitelist));
    auto gateway = backend.gateway(cfg.rng_seed);
    adaptation::PipelineOptions popts;
    popts.workers = workers;
    if (progress > 0) {
      popts.progress_interval = progress;
      popts.on_progress = [&err](const adaptation::MonitorStats& s) { err << s.to_json().dump() << '\n'; };
    }
    auto result = adaptation::run_pipeline(instances, cfg, *gateway, reg, popts);

    const fs::path dir(out_dir);
    fs::create_directories(dir);
    std::ostringstream adapted, traces;
    corpus::write_instances(adapted, result.adapted);
    adaptation::write_traces(traces, result.traces);
    write_text(dir / "adapted.jsonl", adapted.str());
    write_text(dir / "traces.jsonl", traces.str());
    write_text(dir / "stats.json", result.stats.to_json().dump(2) + "\n");
    write_text(dir / "usage.json", gateway->ledger().to_json().dump(2) + "\n");
    nlohmann::json errors = nlohmann::json::array();
    for (const auto& e : result.errors)
      errors.push_back({{"instance_id", e.instance_id}, {"stage", adaptation::to_string(e.stage)}, {"message", e.message}});
    out << nlohmann::json{{"instances", result.adapted.size()}, {"stats", result.stats.to_json()}, {"errors", errors}}.dump(2)
        << '\n';
  }
};

// evaluate -------------------------------------------------------------------

struct EvaluateCmd {
  std::vector<std::string> inputs;
  std::string out_dir;
  std::string questions;
  std::size_t workers = 1;
  bool exclude_first = false;
  BackendFlags backend;

  void add(CLI::App& app, std::function<void()>& action, std::ostream& out) {
    auto* sub = app.add_subcommand("evaluate", "Score assistant turns of stored conversations");
    sub->add_option("inputs", inputs, "Conversation JSON or transcript JSONL files")->required()->check(CLI::ExistingFile);
    sub->add_option("-o,--out", out_dir, "Directory for per-conversation report JSON")->required();
    sub->add_option("--questions", questions, "Dimension questions JSON");
    sub->add_option("--workers", workers)->check(CLI::PositiveNumber);
    sub->add_flag("--exclude-first-turn", exclude_first, "Leave low-context first turns out of the means");
    backend.add_to(sub);
    sub->callback([this, &action, &out] { action = [this, &out] { run(out); }; });
  }

  void run(std::ostream& out) {
    const auto q = questions.empty() ? evaluation::DimensionQuestions::defaults()
                                     : evaluation::DimensionQuestions::from_json(read_json_file(questions));
    std::vector<dialogue::Conversation> convs;
    for (const auto& in : inputs) {
      auto loaded = evaluation::load_conversations(in);
      convs.insert(convs.end(), loaded.begin(), loaded.end());
    }
    auto gateway = backend.gateway(0);
    auto reports = evaluation::evaluate_all(convs, q, *gateway, workers);
    const fs::path dir(out_dir);
    fs::create_directories(dir);
    for (const auto& r : reports) write_text(dir / ("report-" + r.conversation_id + ".json"), evaluation::to_json(r).dump(2) + "\n");
    const auto table = evaluation::aggregate(reports, exclude_first);
    write_text(dir / "aggregate.csv", table.to_csv());
    out << table.to_csv();
    for (const auto& r : reports)
      if (r.incomplete) throw Error(ErrorCode::Upstream, "report for '" + r.conversation_id + "' is incomplete: " + r.error.value_or(""));
  }
};

// report ---------------------------------------------------------------------

struct ReportCmd {
  std::vector<std::string> inputs;
  std::string format = "csv";
  bool exclude_first = false;

  void add(CLI::App& app, std::function<void()>& action, std::ostream& out) {
    auto* sub = app.add_subcommand("report", "Aggregate evaluation reports into a summary table");
    sub->add_option("inputs", inputs, "Report JSON files or directories of them")->required()->check(CLI::ExistingPath);
    sub->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));
    sub->add_flag("--exclude-first-turn", exclude_first);
    sub->callback([this, &action, &out] { action = [this, &out] { run(out); }; });
  }

  void run(std::ostream& out) {
    std::vector<fs::path> files;
    for (const auto& in : inputs) {
      if (fs::is_directory(in)) {
        for (const auto& e : fs::directory_iterator(in))
          if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
      } else {
        files.emplace_back(in);
      }
    }
    std::sort(files.begin(), files.end());
    std::vector<evaluation::ConversationReport> reports;
    for (const auto& f : files) reports.push_back(evaluation::report_from_json(read_json_file(f)));
    const auto table = evaluation::aggregate(reports, exclude_first);
    if (format == "json") {
      out << table.to_json().dump(2) << '\n';
    } else {
      out << table.to_csv();
    }
  }
};

// likert ---------------------------------------------------------------------

struct LikertCmd {
  std::string input;

  void add(CLI::App& app, std::function<void()>& action, std::ostream& out) {
    auto* sub = app.add_subcommand("likert", "Summarize expert ratings (CSV: section,item_id,rater_id,score)");
    sub->add_option("input", input)->required()->check(CLI::ExistingFile);
    sub->callback([this, &action, &out] { action = [this, &out] { run(out); }; });
  }

  void run(std::ostream& out) {
    auto in = open_input(input);
    const auto ratings = evaluation::parse_likert_csv(in);
    out << evaluation::likert_summary(ratings).to_json().dump(2) << '\n';
  }
};

// serve ----------------------------------------------------------------------

struct ServeCmd {
  std::string config;
  std::string data_dir;
  std::string host;
  std::optional<int> port;
  BackendFlags backend;

  void add(CLI::App& app, std::function<void()>& action, std::ostream& out) {
    auto* sub = app.add_subcommand("serve", "Run the HTTP API");
    sub->add_option("--config", config, "Service config JSON (default: $KARABO_CONFIG)");
    sub->add_option("--data-dir", data_dir, "Conversation storage directory");
    sub->add_option("--host", host);
    sub->add_option("--port", port, "0 picks a free port")->check(CLI::Range(0, 65535));
    backend.add_to(sub);
    sub->callback([this, &action, &out] { action = [this, &out] { run(out); }; });
  }

  void run(std::ostream& out) {
    auto cfg = config.empty() ? service::config_from_env() : service::ServiceConfig::load(config);
    if (!data_dir.empty()) cfg.data_dir = data_dir;
    if (!host.empty()) cfg.host = host;
    if (port) cfg.port = *port;
    service::Server server(cfg, backend.gateway(0));
    const int bound = server.bind(cfg.port);
    out << "listening on http://" << cfg.host << ":" << bound << std::endl;
    server.listen();
  }
};

// replay-cases ---------------------------------------------------------------

struct ReplayCmd {
  std::string out_dir;
  std::string config;
  std::string fixtures;
  std::string registry;
  std::string language = "english";
  std::string format = "csv";
  BackendFlags backend;

  void add(CLI::App& app, std::function<void()>& action, std::ostream& out) {
    auto* sub = app.add_subcommand("replay-cases", "Replay the bundled case studies and score the replies");
    sub->add_option("-o,--out", out_dir, "Directory for replay.json and aggregate.csv");
    sub->add_option("--config", config, "Dialogue config JSON");
    sub->add_option("--fixtures", fixtures, "Case-study JSON instead of the bundled set")->check(CLI::ExistingFile);
    sub->add_option("--registry", registry, "Proverb registry for the proverb detector")->check(CLI::ExistingFile);
    sub->add_option("--language", language);
    sub->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));
    backend.add_to(sub);
    sub->callback([this, &action, &out] { action = [this, &out] { run(out); }; });
  }

  void run(std::ostream& out) {
    const auto cases = fixtures.empty() ? service::bundled_case_studies()
                                        : service::parse_case_studies(read_json_file(fixtures));
    service::ReplayOptions opts;
    opts.language = language;
    if (!registry.empty()) opts.registry = adaptation::ProverbRegistry::load(registry);
    dialogue::DialogueEngine engine(dialogue_config_from(config));
    auto gateway = backend.gateway(0);
    const auto result = service::replay_cases(cases, engine, *gateway, opts);
    if (!out_dir.empty()) {
      write_text(fs::path(out_dir) / "replay.json", result.to_json().dump(2) + "\n");
      write_text(fs::path(out_dir) / "aggregate.csv", result.table.to_csv());
    }
    if (format == "json") {
      out << result.to_json().dump(2) << '\n';
    } else {
      out << result.table.to_csv(false);
    }
  }
};

// export-finetune ------------------------------------------------------------

struct ExportCmd {
  std::string input;
  std::string out_dir;
  std::string config;
  dialogue::FineTuneJobSpec spec;

  void add(CLI::App& app, std::function<void()>& action, std::ostream& out) {
    auto* sub = app.add_subcommand("export-finetune", "Write a chat fine-tuning file and job manifest");
    sub->add_option("input", input, "Adapted turn instances (JSONL)")->required()->check(CLI::ExistingFile);
    sub->add_option("out_dir", out_dir)->required();
    sub->add_option("--config", config, "Dialogue config JSON supplying the persona");
    sub->add_option("--base-model", spec.base_model);
    sub->add_option("--epochs", spec.epochs)->check(CLI::PositiveNumber);
    sub->add_option("--batch-size", spec.batch_size)->check(CLI::PositiveNumber);
    sub->add_option("--lr-multiplier", spec.lr_multiplier)->check(CLI::PositiveNumber);
    sub->add_option("--seed", spec.seed);
    sub->callback([this, &action, &out] { action = [this, &out] { run(out); }; });
  }

  void run(std::ostream& out) {
    auto in = open_input(input);
    const auto instances = corpus::read_instances(in);
    const auto manifest =
        dialogue::export_finetune_spec(instances, dialogue_config_from(config).persona, spec, out_dir);
    out << manifest.dump(2) << '\n';
  }
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Karabo: culturally adapted counselling dialogue toolkit", "karabo"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "karabo 0.1.0");

  std::function<void()> action;
  PreprocessCmd preprocess;
  AdaptCmd adapt;
  EvaluateCmd evaluate;
  ReportCmd report;
  LikertCmd likert;
  ServeCmd serve;
  ReplayCmd replay;
  ExportCmd exporter;
  preprocess.add(app, action, out);
  adapt.add(app, action, out, err);
  evaluate.add(app, action, out);
  report.add(app, action, out);
  likert.add(app, action, out);
  serve.add(app, action, out);
  replay.add(app, action, out);
  exporter.add(app, action, out);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << app.version() << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const auto* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << sub->help();
    return 2;
  }

  try {
    if (action) action();
    return 0;
  } catch (const Error& e) {
    err << nlohmann::json{{"error", {{"code", e.code_name()}, {"message", e.what()}}}}.dump() << '\n';
  } catch (const std::exception& e) {
    err << nlohmann::json{{"error", {{"code", "E_INTERNAL"}, {"message", e.what()}}}}.dump() << '\n';
  }
  return 1;
}

}  // namespace karabo::cli
