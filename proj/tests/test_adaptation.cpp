#include <doctest.h>

#include <map>
#include <sstream>

#include "karabo/adaptation/pipeline.hpp"
#include "karabo/error.hpp"
#include "karabo/llm/mock.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace karabo;
using namespace karabo::adaptation;

namespace {

llm::GatewayOptions quiet() {
  llm::GatewayOptions o;
  o.sleep = [](std::chrono::milliseconds) {};
  return o;
}

corpus::TurnInstance sample() {
  corpus::TurnInstance t;
  t.source_id = "s";
  t.pair_index = 0;
  t.client_text = "I feel so alone since I moved.";
  t.counselor_text = "It sounds like you are carrying a lot.";
  t.technique_label = "Reframing";
  t.technique_class = corpus::TechniqueClass::CR;
  return t;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::Io;
}

AdaptationConfig only(Stage s) {
  auto c = AdaptationConfig::defaults();
  c.stage_toggles = {false, false, false, false, false};
  c.stage_toggles[index_of(s)] = true;
  return c;
}

}  // namespace

TEST_CASE("config defaults and validation") {
  auto c = AdaptationConfig::defaults();
  CHECK(c.faith_threshold == 0.7);
  CHECK(c.proverb_threshold == 0.8);
  CHECK(c.max_proverb_attempts == 3);
  CHECK_NOTHROW(c.validate());
  c.faith_threshold = 1.2;
  CHECK(code_of([&] { c.validate(); }) == ErrorCode::Config);
  c = AdaptationConfig::defaults();
  c.max_proverb_attempts = 0;
  CHECK(code_of([&] { c.validate(); }) == ErrorCode::Config);
  c = AdaptationConfig::defaults();
  c.templates.simplify = "Rewrite {nonsense}";
  CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("config JSON round trip and stage lists") {
  auto c = AdaptationConfig::defaults();
  c.rng_seed = 99;
  c.faith_threshold = 0.5;
  auto back = AdaptationConfig::from_json(c.to_json());
  CHECK(back.rng_seed == 99);
  CHECK(back.faith_threshold == 0.5);
  CHECK(back.templates.ubuntu == c.templates.ubuntu);
  auto t = AdaptationConfig::parse_stage_list("ubuntu,faith");
  CHECK(t == std::array<bool, 5>{true, false, false, true, false});
  CHECK(AdaptationConfig::parse_stage_list("none") == std::array<bool, 5>{});
  CHECK_THROWS_AS(AdaptationConfig::parse_stage_list("ubuntu,bogus"), Error);
}

TEST_CASE("the Ubuntu prompt names all three pillars") {
  const auto prompt = render_stage_prompt(Stage::Ubuntu, sample(), AdaptationConfig::defaults());
  CHECK(prompt.find("Connectedness") != std::string::npos);
  CHECK(prompt.find("Competency") != std::string::npos);
  CHECK(prompt.find("Consciousness") != std::string::npos);
  CHECK(prompt.find(sample().client_text) != std::string::npos);
}

TEST_CASE("proverb registry parsing") {
  auto r = ProverbRegistry::from_text("# comment\n1. One.\n2) Two.\n3: Three.\n");
  REQUIRE(r.size() == 3);
  CHECK(r.at(2) == "Two.");
  CHECK(code_of([&] { r.at(0); }) == ErrorCode::Range);
  CHECK(code_of([&] { r.at(4); }) == ErrorCode::Range);
  CHECK_THROWS_AS(ProverbRegistry::from_text("1. A\n3. B\n"), Error);
  CHECK_THROWS_AS(ProverbRegistry::from_text("1. A\n2. A\n"), Error);
  CHECK(ProverbRegistry::from_json(nlohmann::json::array({"x", "y"})).at(2) == "y");
  CHECK_THROWS_AS(ProverbRegistry::from_json(nlohmann::json::array({"x", ""})), Error);
  CHECK(ProverbRegistry::placeholder().size() == 100);
}

TEST_CASE("random streams are keyed and deterministic") {
  auto a = RandomStream::for_instance(1, "x#0", Stage::Faith);
  auto b = RandomStream::for_instance(1, "x#0", Stage::Faith);
  auto c = RandomStream::for_instance(1, "x#0", Stage::Proverb);
  auto d = RandomStream::for_instance(2, "x#0", Stage::Faith);
  const double ua = a.uniform01();
  CHECK(ua == b.uniform01());
  CHECK(ua != c.uniform01());
  CHECK(ua != d.uniform01());

  RandomStream r(5);
  std::map<std::size_t, int> counts;
  for (int i = 0; i < 50000; ++i) {
    const double u = r.uniform01();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    ++counts[r.uniform_index(1, 10)];
  }
  REQUIRE(counts.size() == 10);
  CHECK(counts.begin()->first == 1);
  CHECK(counts.rbegin()->first == 10);
  for (const auto& [k, n] : counts) CHECK(std::abs(n - 5000) < 400);
}

TEST_CASE("rewrite stages touch only counselor text") {
  llm::Gateway echo(std::make_shared<llm::EchoBackend>(), quiet());
  const auto cfg = AdaptationConfig::defaults();
  auto r = inject_ubuntu(sample(), cfg, echo);
  CHECK(r.instance.client_text == sample().client_text);
  CHECK(r.instance.counselor_text == "[MOCK]" + sample().counselor_text);
  CHECK(r.entry.applied);
  CHECK(r.entry.before_hash != r.entry.after_hash);

  llm::Gateway identity(llm::make_mock_backend("identity"), quiet());
  auto same = simplify_language(sample(), cfg, identity);
  CHECK_FALSE(same.entry.applied);
  CHECK(same.entry.before_hash == same.entry.after_hash);
}

TEST_CASE("disabled stages make no calls") {
  auto cap = std::make_shared<llm::CapturingBackend>(std::make_shared<llm::EchoBackend>());
  llm::Gateway g(cap, quiet());
  auto cfg = only(Stage::Simplify);
  auto r = inject_ubuntu(sample(), cfg, g);
  CHECK_FALSE(r.entry.enabled);
  CHECK_FALSE(r.entry.applied);
  CHECK(cap->requests().empty());
  CHECK(cap->queries().empty());
}

TEST_CASE("provider failures leave the instance unchanged") {
  auto script = std::make_shared<llm::ScriptBackend>(
      std::vector<llm::ScriptBackend::CompletionStep>{llm::ScriptBackend::Failure{400, "nope"}},
      std::vector<llm::ScriptBackend::VerdictStep>{});
  llm::Gateway g(script, quiet());
  auto r = remove_clinical_terms(sample(), AdaptationConfig::defaults(), g);
  CHECK(r.instance == sample());
  REQUIRE(r.entry.error);
  CHECK(r.entry.error->find("E_PROVIDER") == 0);
  CHECK_FALSE(r.entry.applied);
}

TEST_CASE("faith gate: a 'no' verdict draws nothing") {
  auto cap = std::make_shared<llm::CapturingBackend>(llm::make_mock_backend("no"));
  llm::Gateway g(cap, quiet());
  auto rng = RandomStream::for_instance(1, "s#0", Stage::Faith);
  auto r = integrate_faith(sample(), AdaptationConfig::defaults(), g, rng);
  CHECK(r.entry.judge_decision == false);
  CHECK_FALSE(r.entry.gate_draw);
  CHECK(cap->requests().empty());
  CHECK(cap->queries().size() == 1);
}

TEST_CASE("faith gate: thresholds 1 and 0") {
  llm::Gateway g(llm::make_mock_backend("yes"), quiet());
  auto cfg = AdaptationConfig::defaults();
  cfg.faith_threshold = 1.0;
  for (int i = 0; i < 50; ++i) {
    auto rng = RandomStream::for_instance(3, std::to_string(i), Stage::Faith);
    CHECK(integrate_faith(sample(), cfg, g, rng).entry.applied);
  }
  cfg.faith_threshold = 0.0;
  for (int i = 0; i < 50; ++i) {
    auto rng = RandomStream::for_instance(3, std::to_string(i), Stage::Faith);
    auto r = integrate_faith(sample(), cfg, g, rng);
    CHECK(r.entry.gate_draw);
    CHECK_FALSE(r.entry.applied);
  }
}

TEST_CASE("proverb retries stop at the first suitable draw") {
  const auto registry = ProverbRegistry::placeholder();
  auto cfg = AdaptationConfig::defaults();
  cfg.proverb_threshold = 1.0;
  // benefit yes, suitability no, suitability yes
  auto script = std::make_shared<llm::ScriptBackend>(
      std::vector<llm::ScriptBackend::CompletionStep>{std::string("rewritten with proverb")},
      std::vector<llm::ScriptBackend::VerdictStep>{llm::BooleanVerdict{0.9, 0.1}, llm::BooleanVerdict{0.1, 0.9},
                                                   llm::BooleanVerdict{0.9, 0.1}});
  auto cap = std::make_shared<llm::CapturingBackend>(script);
  llm::Gateway g(cap, quiet());
  auto rng = RandomStream::for_instance(8, "s#0", Stage::Proverb);
  auto r = integrate_proverb(sample(), cfg, g, rng, registry);
  REQUIRE(r.entry.proverb_attempts.size() == 2);
  CHECK_FALSE(r.entry.proverb_attempts[0].suitable);
  CHECK(r.entry.proverb_attempts[1].suitable);
  CHECK(r.entry.applied);
  CHECK(r.instance.counselor_text == "rewritten with proverb");
  const auto reqs = cap->requests();
  REQUIRE(reqs.size() == 1);
  const auto& chosen = registry.at(r.entry.proverb_attempts[1].index);
  CHECK(reqs[0].system_prompt.find(chosen) != std::string::npos);
  const auto qs = cap->queries();
  REQUIRE(qs.size() == 3);
  CHECK(qs[1].response == registry.at(r.entry.proverb_attempts[0].index));
}

TEST_CASE("proverb retries are bounded by max attempts") {
  const auto registry = ProverbRegistry::placeholder();
  for (int attempts : {1, 2, 5}) {
    auto cfg = AdaptationConfig::defaults();
    cfg.proverb_threshold = 1.0;
    cfg.max_proverb_attempts = attempts;
    auto cap = std::make_shared<llm::CapturingBackend>(
        llm::make_routed_mock({"echo", "adapt.proverb.benefit=yes", "adapt.proverb.suitability=no"}));
    llm::Gateway g(cap, quiet());
    auto rng = RandomStream::for_instance(8, "s#0", Stage::Proverb);
    auto r = integrate_proverb(sample(), cfg, g, rng, registry);
    CHECK(r.entry.proverb_attempts.size() == static_cast<std::size_t>(attempts));
    CHECK_FALSE(r.entry.applied);
    CHECK(r.instance == sample());
    CHECK(r.entry.warnings.size() == 1);
    CHECK(cap->requests().empty());
  }
}

TEST_CASE("pipeline keeps order, counts, and collects errors") {
  gen::Rng rng(3);
  auto inst = gen::instances(rng, 40);
  auto cfg = AdaptationConfig::defaults();
  cfg.rng_seed = 17;
  llm::Gateway g(llm::make_routed_mock({"echo", "adapt.faith=yes", "adapt.proverb=yes"}), quiet());
  auto res = run_pipeline(inst, cfg, g, ProverbRegistry::placeholder());
  REQUIRE(res.adapted.size() == inst.size());
  REQUIRE(res.traces.size() == inst.size());
  for (std::size_t i = 0; i < inst.size(); ++i) {
    CHECK(res.adapted[i].instance_id() == inst[i].instance_id());
    CHECK(res.traces[i].instance_id == inst[i].instance_id());
    CHECK(res.traces[i].stages.size() == 5);
  }
  CHECK(res.stats == MonitorStats::from_traces(res.traces));
  CHECK(res.stats[Stage::Ubuntu].applied == inst.size());
  for (auto s : kStages) {
    const auto& c = res.stats[s];
    CHECK(c.applied <= c.gated_in);
    CHECK(c.gated_in <= c.judged_yes);
    CHECK(c.judged_yes <= c.eligible);
  }
  CHECK(res.errors.empty());
}

TEST_CASE("pipeline records per-instance stage errors and continues") {
  gen::Rng rng(4);
  auto inst = gen::instances(rng, 6);
  auto script = std::make_shared<llm::ScriptBackend>(
      std::vector<llm::ScriptBackend::CompletionStep>{llm::ScriptBackend::Failure{400, "bad"}},
      std::vector<llm::ScriptBackend::VerdictStep>{});
  llm::Gateway g(script, quiet());
  auto res = run_pipeline(inst, only(Stage::Ubuntu), g, ProverbRegistry::placeholder());
  CHECK(res.errors.size() == inst.size());
  CHECK(res.adapted == inst);
  CHECK(res.stats[Stage::Ubuntu].errors == inst.size());
}

TEST_CASE("pipeline rejects invalid configuration up front") {
  llm::Gateway g(std::make_shared<llm::EchoBackend>(), quiet());
  auto cfg = AdaptationConfig::defaults();
  cfg.proverb_threshold = -0.1;
  std::vector<corpus::TurnInstance> one = {sample()};
  CHECK_THROWS_AS(run_pipeline(one, cfg, g, ProverbRegistry::placeholder()), Error);
}

TEST_CASE("property: traces survive a JSON round trip") {
  gen::Rng rng(12);
  auto inst = gen::instances(rng, 30);
  auto cfg = AdaptationConfig::defaults();
  llm::Gateway g(llm::make_mock_backend("hash:3"), quiet());
  auto res = run_pipeline(inst, cfg, g, ProverbRegistry::placeholder());
  for (const auto& t : res.traces) CHECK(trace_from_json(to_json(t)) == t);
}
