// Acceptance runner. Each criterion runs offline against mock backends and
// prints one PASS/FAIL line. The exit status is nonzero when any fails.

#include <httplib.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "karabo/adaptation/pipeline.hpp"
#include "karabo/dialogue/engine.hpp"
#include "karabo/dialogue/finetune.hpp"
#include "karabo/error.hpp"
#include "karabo/evaluation/detectors.hpp"
#include "karabo/evaluation/likert.hpp"
#include "karabo/evaluation/scoring.hpp"
#include "karabo/llm/mock.hpp"
#include "karabo/service/fixtures.hpp"
#include "karabo/service/replay.hpp"
#include "karabo/service/server.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

namespace fs = std::filesystem;
using namespace karabo;
using nlohmann::json;

namespace {

// Collects failed expectations for one criterion.
struct Check {
  std::vector<std::string> failures;

  void expect(bool ok, const std::string& what) {
    if (!ok && failures.size() < 5) failures.push_back(what);
    if (!ok) ++failed;
  }
  std::size_t failed = 0;
};

struct Criterion {
  int number;
  std::string title;
  double time_limit_s;  // 0 means no limit
  std::function<void(Check&)> body;
};

llm::GatewayOptions quiet() {
  llm::GatewayOptions o;
  o.sleep = [](std::chrono::milliseconds) {};
  return o;
}

fs::path fresh_dir(const std::string& name) {
  auto d = fs::temp_directory_path() / ("karabo_accept_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

void scoring_formula(Check& c) {
  gen::Rng rng(1001);
  for (int i = 0; i < 1000; ++i) {
    const double y = rng.unit() * 10 + 1e-6, n = rng.unit() * 10 + 1e-6;
    const double k = std::exp(rng.unit() * 16 - 8);
    const double s = evaluation::score_turn({y, n});
    c.expect(std::abs(s - y / (y + n)) <= 1e-12, "formula mismatch");
    c.expect(std::abs(s + evaluation::score_turn({n, y}) - 1.0) <= 1e-12, "complement symmetry");
    c.expect(std::abs(evaluation::score_turn({k * y, k * n}) - s) <= 1e-12, "scale invariance");
  }
}

void gate_statistics(Check& c) {
  gen::Rng rng(2);
  const auto inst = gen::instances(rng, 10000);
  auto cfg = adaptation::AdaptationConfig::defaults();
  cfg.rng_seed = 20240601;
  llm::Gateway g(llm::make_mock_backend("yes"), quiet());
  const auto res = adaptation::run_pipeline(inst, cfg, g, adaptation::ProverbRegistry::placeholder());
  const double faith = static_cast<double>(res.stats[adaptation::Stage::Faith].applied) / inst.size();
  const double proverb = static_cast<double>(res.stats[adaptation::Stage::Proverb].applied) / inst.size();
  c.expect(faith >= 0.685 && faith <= 0.715, "faith fraction " + fmt(faith));
  c.expect(proverb >= 0.785 && proverb <= 0.815, "proverb fraction " + fmt(proverb));
  c.expect(res.errors.empty(), "pipeline errors");
}

void retry_bound(Check& c) {
  gen::Rng rng(3);
  const auto inst = gen::instances(rng, 1000);
  for (int max_attempts : {3, 2}) {
    auto cfg = adaptation::AdaptationConfig::defaults();
    cfg.rng_seed = 77;
    cfg.max_proverb_attempts = max_attempts;
    auto cap = std::make_shared<llm::CapturingBackend>(
        llm::make_routed_mock({"echo", "adapt.proverb.benefit=yes", "adapt.proverb.suitability=no"}));
    llm::Gateway g(cap, quiet());
    const auto res = adaptation::run_pipeline(inst, cfg, g, adaptation::ProverbRegistry::placeholder());
    const std::size_t expected = static_cast<std::size_t>(std::min(3, max_attempts));
    std::size_t gated = 0;
    for (const auto& t : res.traces) {
      const auto& e = t.stages[adaptation::index_of(adaptation::Stage::Proverb)];
      c.expect(!e.applied, "proverb applied under unsuitable mock");
      if (e.gated_in) {
        ++gated;
        c.expect(e.proverb_attempts.size() == expected, "attempts in trace");
        for (const auto& a : e.proverb_attempts) c.expect(!a.suitable, "attempt marked suitable");
      } else {
        c.expect(e.proverb_attempts.empty(), "attempts without gate");
      }
    }
    std::size_t queries = 0;
    for (const auto& q : cap->queries()) queries += q.stage == "adapt.proverb.suitability";
    c.expect(queries == gated * expected, "suitability queries " + std::to_string(queries));
    c.expect(res.stats[adaptation::Stage::Proverb].applied == 0, "applied count");
    c.expect(gated > 0, "no gated instances");
  }
}

void client_immutability(Check& c) {
  gen::Rng rng(4);
  const auto inst = gen::instances(rng, 1000);
  auto cfg = adaptation::AdaptationConfig::defaults();
  cfg.rng_seed = 4;
  const std::vector<std::vector<std::string>> mocks = {
      {"append: [changed]", "adapt.faith=yes", "adapt.proverb=yes"},
      {"lower", "adapt.faith=yes", "adapt.proverb=yes"},
      {"hash:9"},
  };
  for (const auto& spec : mocks) {
    llm::Gateway g(llm::make_routed_mock(spec), quiet());
    const auto res = adaptation::run_pipeline(inst, cfg, g, adaptation::ProverbRegistry::placeholder());
    c.expect(res.adapted.size() == inst.size(), "instance count");
    for (std::size_t i = 0; i < inst.size() && i < res.adapted.size(); ++i)
      c.expect(res.adapted[i].client_text == inst[i].client_text, "client text changed");
  }
  auto reverse = llm::FunctionBackend::transform([](const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> words{std::istream_iterator<std::string>(in), {}};
    std::string out;
    for (auto it = words.rbegin(); it != words.rend(); ++it) out += (out.empty() ? "" : " ") + *it;
    return out.empty() ? std::string("reversed") : out;
  });
  llm::Gateway g(reverse, quiet());
  const auto res = adaptation::run_pipeline(inst, cfg, g, adaptation::ProverbRegistry::placeholder());
  for (std::size_t i = 0; i < inst.size(); ++i)
    c.expect(res.adapted[i].client_text == inst[i].client_text, "client text changed (reverse)");
}

void parallel_determinism(Check& c) {
  gen::Rng rng(5);
  const auto inst = gen::instances(rng, 600);
  auto cfg = adaptation::AdaptationConfig::defaults();
  cfg.rng_seed = 99;
  std::vector<std::string> outputs;
  for (std::size_t workers : {1u, 4u, 16u}) {
    llm::Gateway g(llm::make_mock_backend("hash:5"), quiet());
    adaptation::PipelineOptions opts;
    opts.workers = workers;
    const auto res = adaptation::run_pipeline(inst, cfg, g, adaptation::ProverbRegistry::placeholder(), opts);
    std::ostringstream os;
    corpus::write_instances(os, res.adapted);
    os << "--\n";
    adaptation::write_traces(os, res.traces);
    os << "--\n" << res.stats.to_json().dump();
    outputs.push_back(os.str());
  }
  c.expect(outputs[0] == outputs[1], "workers 1 vs 4");
  c.expect(outputs[0] == outputs[2], "workers 1 vs 16");
}

void corpus_oracle(Check& c) {
  gen::Rng rng(6);
  const auto wl = corpus::TechniqueWhitelist::defaults();
  std::vector<corpus::SessionRecord> records;
  std::vector<std::string> expected_kept;
  for (int i = 0; i < 500; ++i) {
    const auto turns = gen::dialogue(rng);
    const auto label = rng.pick(gen::technique_labels());
    auto rec = corpus::parse_record(gen::record_json(rng, "r" + std::to_string(i), turns, label), i + 1);
    const auto seg = corpus::segment_single_turn(rec, wl);
    c.expect(seg.size() == (wl.contains(label) ? oracle::adjacency_pairs(turns) : 0), "pair count");
    if (wl.contains(label)) expected_kept.push_back(rec.id);
    records.push_back(std::move(rec));
  }
  const auto filtered = corpus::filter_by_technique(records, wl);
  std::vector<std::string> kept;
  for (const auto& r : filtered.records) kept.push_back(r.id);
  c.expect(kept == expected_kept, "filter kept set");
  c.expect(filtered.dropped == records.size() - expected_kept.size(), "filter dropped count");
}

void greeting_exactness(Check& c) {
  dialogue::DialogueEngine engine{dialogue::DialogueConfig{}};
  c.expect(engine.start("setswana").greeting == "Dumela, kenna Karabo", "setswana");
  c.expect(engine.start("english").greeting == "Hi, I'm Karabo", "english");
}

void generation_parameters(Check& c) {
  dialogue::DialogueEngine engine{dialogue::DialogueConfig{}};
  auto cap = std::make_shared<llm::CapturingBackend>(std::make_shared<llm::EchoBackend>());
  llm::Gateway g(cap, quiet());
  gen::Rng rng(8);
  for (int k = 0; k < 20; ++k) {
    auto conv = engine.start("english");
    const int turns = rng.between(1, 6);
    for (int t = 0; t < turns; ++t) engine.respond(conv, gen::sentence(rng), g);
  }
  const auto reqs = cap->requests();
  c.expect(!reqs.empty(), "no requests captured");
  for (const auto& r : reqs) {
    c.expect(r.temperature == 0.35, "temperature");
    c.expect(r.max_tokens == 2048, "max_tokens");
    c.expect(r.top_p == 1.0, "top_p");
    c.expect(r.frequency_penalty == 0.0, "frequency_penalty");
    c.expect(r.presence_penalty == 0.0, "presence_penalty");
  }
}

void finetune_manifest(Check& c) {
  const auto dir = fresh_dir("ft");
  gen::Rng rng(9);
  const auto inst = gen::instances(rng, 7);
  dialogue::export_finetune_spec(inst, dialogue::PersonaPrompt::defaults(), {}, dir);
  const auto m = json::parse(slurp(dir / "manifest.json"));
  c.expect(m["base_model"] == "gpt-4o-mini-2024-07-18", "base_model");
  c.expect(m["epochs"] == 3, "epochs");
  c.expect(m["batch_size"] == 11, "batch_size");
  c.expect(m["lr_multiplier"] == 1.8, "lr_multiplier");
  c.expect(m["seed"] == 2038458019, "seed");
  fs::remove_all(dir);
}

void evaluation_context(Check& c) {
  gen::Rng rng(10);
  for (int trial = 0; trial < 20; ++trial) {
    dialogue::Conversation conv;
    conv.id = "c" + std::to_string(trial);
    const int turns = rng.between(1, 10);
    for (int t = 0; t < turns; ++t) {
      conv.messages.push_back({llm::Role::User, gen::sentence(rng), {}, std::nullopt, std::nullopt});
      conv.messages.push_back({llm::Role::Assistant, gen::sentence(rng), {}, std::nullopt, std::nullopt});
    }
    auto cap = std::make_shared<llm::CapturingBackend>(std::make_shared<llm::ConstantBackend>(0.9, 0.1));
    llm::Gateway g(cap, quiet());
    const auto report = evaluation::evaluate_conversation(conv, evaluation::DimensionQuestions::defaults(), g);
    const auto qs = cap->queries();
    c.expect(qs.size() == 3 * static_cast<std::size_t>(turns), "3 judge calls per turn");
    for (std::size_t q = 0; q < qs.size(); ++q) {
      const std::size_t k = 2 * (q / 3) + 1;  // 0-based index of the judged assistant message
      std::string expected;
      for (std::size_t m = 0; m < k; ++m) {
        if (m) expected += '\n';
        expected += (conv.messages[m].role == llm::Role::User ? "User: " : "Assistant: ") + conv.messages[m].text;
      }
      c.expect(qs[q].context == expected, "context for turn");
      c.expect(qs[q].response == conv.messages[k].text, "judged response");
    }
    for (const auto& t : report.turns)
      for (double s : t.scores) c.expect(std::abs(s - 0.9) <= 1e-12, "turn score");
    for (double m : report.means) c.expect(std::abs(m - 0.9) <= 1e-12, "mean");
  }
}

void detector_suite(Check& c) {
  const auto p = evaluation::detect_scripture("Philippians 4:6-7");
  c.expect(p.size() == 1 && p[0].book == "Philippians" && p[0].chapter == 4 && p[0].verse_start == 6 &&
               p[0].verse_end == 7,
           "Philippians 4:6-7");
  const auto k = evaluation::detect_scripture("1 Corinthians 12:12-14");
  c.expect(k.size() == 1 && k[0].book == "1 Corinthians" && k[0].chapter == 12 && k[0].verse_start == 12 &&
               k[0].verse_end == 14,
           "1 Corinthians 12:12-14");
  const auto d = evaluation::detect_clinical_terms("depression");
  c.expect(d.size() == 1 && d[0].term == "depression", "depression");
  const auto a = evaluation::detect_clinical_terms("ANXIETY");
  c.expect(a.size() == 1 && a[0].term == "anxiety", "ANXIETY");
  c.expect(evaluation::detect_clinical_terms("tired and heavy").empty(), "tired and heavy");
  const auto issues = service::check_fixture_integrity(service::bundled_case_studies(), service::IntegrityMode::Exact);
  std::size_t total = 0;
  for (const auto& f : service::bundled_case_studies()) total += f.symptom_annotations.size();
  c.expect(issues.empty(), "fixture integrity: " + std::to_string(issues.size()) + "/" + std::to_string(total) +
                               " indicators not found verbatim in their narratives");
}

void likert_arithmetic(Check& c) {
  gen::Rng rng(12);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<evaluation::LikertRating> ratings;
    std::vector<int> scores;
    for (auto section : evaluation::kLikertSections) {
      const int n = rng.between(1, 40);
      for (int i = 0; i < n; ++i) {
        const int s = rng.between(1, 5);
        ratings.push_back({section, std::to_string(i), "r" + std::to_string(rng.index(10)), s});
        scores.push_back(s);
      }
    }
    const auto sum = evaluation::likert_summary(ratings);
    c.expect(std::abs(sum.overall.mean - oracle::pooled_mean(scores)) <= 1e-12, "pooled mean");
  }
  bool rejected = false;
  try {
    const std::vector<evaluation::LikertRating> zero = {{evaluation::LikertSection::Ubuntu, "q", "r", 0}};
    evaluation::likert_summary(zero);
  } catch (const Error& e) {
    rejected = e.code() == ErrorCode::Range;
  }
  c.expect(rejected, "score 0 rejected");
}

void service_round_trip(Check& c) {
  const auto dir = fresh_dir("service");
  service::ServiceConfig cfg;
  cfg.data_dir = dir;
  cfg.server_threads = 2;
  std::string id, transcript;
  {
    service::Server server(cfg, std::make_shared<llm::Gateway>(std::make_shared<llm::EchoBackend>(), quiet()));
    httplib::Client cli("127.0.0.1", server.start(0));
    auto created = cli.Post("/api/conversations", R"({"language":"english"})", "application/json");
    c.expect(created && created->status == 200, "create");
    if (!created) return;
    id = json::parse(created->body)["id"];
    auto msg = cli.Post("/api/conversations/" + id + "/messages", R"({"text":"hello"})", "application/json");
    c.expect(msg && msg->status == 200 && json::parse(msg->body)["assistant_text"] == "[MOCK]hello", "message");
    auto got = cli.Get("/api/conversations/" + id);
    c.expect(got && got->status == 200, "get");
    if (got) {
      transcript = got->body;
      const auto j = json::parse(transcript);
      c.expect(j["messages"].size() == 2, "2-message transcript");
    }
    server.stop();
  }
  {
    service::Server server(cfg, std::make_shared<llm::Gateway>(std::make_shared<llm::EchoBackend>(), quiet()));
    httplib::Client cli("127.0.0.1", server.start(0));
    auto got = cli.Get("/api/conversations/" + id);
    c.expect(got && got->status == 200 && got->body == transcript, "transcript survives restart");
    server.stop();
  }
  fs::remove_all(dir);

  dialogue::DialogueEngine engine{dialogue::DialogueConfig{}};
  llm::Gateway g(llm::make_routed_mock({"echo", "eval=hash:13"}), quiet());
  const auto replay = service::replay_cases(service::bundled_case_studies(), engine, g);
  const std::string csv = replay.table.to_csv(false);
  std::istringstream in(csv);
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  c.expect(lines.size() == 10, "row count " + std::to_string(lines.size()));
  c.expect(!lines.empty() && lines[0] == "case,naturalness,understandability,coherence", "header");
  const std::regex row(R"((\d),([01]\.\d{4}),([01]\.\d{4}),([01]\.\d{4}))");
  for (std::size_t i = 1; i < lines.size(); ++i) {
    std::smatch m;
    c.expect(std::regex_match(lines[i], m, row) && m[1] == std::to_string(i), "row layout: " + lines[i]);
  }
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "scoring formula", 1, scoring_formula},
      {2, "gate statistics", 30, gate_statistics},
      {3, "proverb retry bound", 10, retry_bound},
      {4, "client immutability", 0, client_immutability},
      {5, "determinism under parallelism", 0, parallel_determinism},
      {6, "corpus oracle", 0, corpus_oracle},
      {7, "greeting exactness", 0, greeting_exactness},
      {8, "generation parameters", 0, generation_parameters},
      {9, "fine-tune manifest", 0, finetune_manifest},
      {10, "evaluation context discipline", 0, evaluation_context},
      {11, "detector suite and fixture integrity", 0, detector_suite},
      {12, "Likert arithmetic", 0, likert_arithmetic},
      {13, "service round trip and case replay", 10, service_round_trip},
  };
  int failed = 0;
  for (const auto& cr : criteria) {
    Check check;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      cr.body(check);
    } catch (const std::exception& e) {
      check.expect(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (cr.time_limit_s > 0) check.expect(secs < cr.time_limit_s, "runtime over " + fmt(cr.time_limit_s) + " s");
    const bool ok = check.failed == 0;
    failed += !ok;
    std::cout << (ok ? "[PASS]" : "[FAIL]") << " criterion " << cr.number << ": " << cr.title << " ("
              << fmt(secs) << " s)";
    if (!ok) {
      std::cout << " - " << check.failed << " failed check(s):";
      for (const auto& f : check.failures) std::cout << " [" << f << "]";
    }
    std::cout << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed ? 1 : 0;
}
