#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "karabo/error.hpp"
#include "karabo/evaluation/aggregate.hpp"
#include "karabo/evaluation/detectors.hpp"
#include "karabo/evaluation/likert.hpp"
#include "karabo/evaluation/scoring.hpp"
#include "karabo/llm/mock.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace karabo;
using namespace karabo::evaluation;

namespace {

llm::GatewayOptions quiet() {
  llm::GatewayOptions o;
  o.sleep = [](std::chrono::milliseconds) {};
  return o;
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

dialogue::Conversation transcript(std::size_t assistant_turns) {
  dialogue::Conversation c;
  c.id = "t";
  for (std::size_t i = 0; i < assistant_turns; ++i) {
    c.messages.push_back({llm::Role::User, "user " + std::to_string(i), {}, std::nullopt, std::nullopt});
    c.messages.push_back({llm::Role::Assistant, "assistant " + std::to_string(i), {}, std::nullopt, std::nullopt});
  }
  return c;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("score examples") {
  CHECK(score_turn({0.3, 0.1}) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(score_turn({0.2, 0.2}) == 0.5);
  CHECK(code_of([] { score_turn({0, 0}); }) == ErrorCode::Degenerate);
  CHECK(code_of([] { score_turn({-0.1, 0.5}); }) == ErrorCode::Range);
  CHECK(score_turn("ctx", "resp", {1, 0}) == 1.0);
}

TEST_CASE("property: complement symmetry and scale invariance") {
  gen::Rng rng(99);
  for (int i = 0; i < 2000; ++i) {
    const double y = rng.unit() + 1e-9, n = rng.unit() + 1e-9, k = std::exp(rng.unit() * 20 - 10);
    CHECK(std::abs(score_turn({y, n}) + score_turn({n, y}) - 1.0) <= 1e-12);
    CHECK(std::abs(score_turn({k * y, k * n}) - score_turn({y, n})) <= 1e-12);
  }
}

TEST_CASE("dimension questions") {
  auto q = DimensionQuestions::defaults();
  CHECK(q.question(Dimension::Naturalness) == "Does this response sound natural and human-like?");
  CHECK(q.question(Dimension::Understandability) == "Is this response clear and easy to understand?");
  CHECK(q.question(Dimension::Coherence) ==
        "Is this response logically consistent and contextually relevant to the conversation?");
  auto back = DimensionQuestions::from_json(q.to_json());
  CHECK(back.question(Dimension::Coherence) == q.question(Dimension::Coherence));
  CHECK(code_of([] { DimensionQuestions::from_json({{"naturalness", "a?"}, {"coherence", "b?"}}); }) ==
        ErrorCode::Config);
  CHECK(code_of([] {
          DimensionQuestions::from_json(nlohmann::json::parse(
              R"([{"dimension":"naturalness","question":"a"},{"dimension":"naturalness","question":"b"}])"));
        }) == ErrorCode::Config);
}

TEST_CASE("evaluation context discipline") {
  auto cap = std::make_shared<llm::CapturingBackend>(std::make_shared<llm::ConstantBackend>(0.9, 0.1));
  llm::Gateway g(cap, quiet());
  const auto c = transcript(12);
  auto report = evaluate_conversation(c, DimensionQuestions::defaults(), g);
  REQUIRE(report.turns.size() == 12);
  CHECK(report.turns[0].low_context_flag);
  CHECK_FALSE(report.turns[1].low_context_flag);
  const auto qs = cap->queries();
  REQUIRE(qs.size() == 36);
  for (std::size_t t = 0; t < 12; ++t) {
    std::string expected;
    for (std::size_t m = 0; m < 2 * t + 1; ++m) {
      if (m) expected += '\n';
      expected += (m % 2 == 0 ? "User: " : "Assistant: ") + c.messages[m].text;
    }
    for (int d = 0; d < 3; ++d) {
      const auto& q = qs[3 * t + d];
      CHECK(q.context == expected);
      CHECK(q.response == c.messages[2 * t + 1].text);
    }
  }
  for (const auto& t : report.turns)
    for (double s : t.scores) CHECK(std::abs(s - 0.9) <= 1e-12);
  for (double m : report.means) CHECK(std::abs(m - 0.9) <= 1e-12);
}

TEST_CASE("parallel dimension judging gives the same report") {
  llm::Gateway g(llm::make_mock_backend("hash:4"), quiet());
  const auto c = transcript(5);
  auto a = evaluate_conversation(c, DimensionQuestions::defaults(), g);
  auto b = evaluate_conversation(c, DimensionQuestions::defaults(), g, {true});
  CHECK(to_json(a) == to_json(b));
}

TEST_CASE("report means equal independently recomputed column means") {
  gen::Rng rng(8);
  llm::Gateway g(llm::make_mock_backend("hash:11"), quiet());
  for (int k = 1; k < 15; ++k) {
    auto r = evaluate_conversation(transcript(k), DimensionQuestions::defaults(), g);
    for (int d = 0; d < 3; ++d) {
      long double sum = 0;
      for (const auto& t : r.turns) sum += t.scores[d];
      CHECK(std::abs(static_cast<double>(sum / r.turns.size()) - r.means[d]) <= 1e-9);
    }
  }
}

TEST_CASE("gateway failure yields a partial report flagged incomplete") {
  std::vector<llm::ScriptBackend::VerdictStep> steps(6, llm::BooleanVerdict{0.5, 0.5});
  steps.push_back(llm::ScriptBackend::Failure{400, "judge down"});
  llm::Gateway g(std::make_shared<llm::ScriptBackend>(std::vector<llm::ScriptBackend::CompletionStep>{}, steps), quiet());
  auto r = evaluate_conversation(transcript(4), DimensionQuestions::defaults(), g);
  CHECK(r.incomplete);
  CHECK(r.turns.size() == 2);
  CHECK(r.expected_turns == 4);
  REQUIRE(r.error);
  CHECK(report_from_json(to_json(r)).turns.size() == 2);
}

TEST_CASE("conversation without assistant turns is rejected") {
  llm::Gateway g(std::make_shared<llm::EchoBackend>(), quiet());
  CHECK(code_of([&] { evaluate_conversation(transcript(0), DimensionQuestions::defaults(), g); }) ==
        ErrorCode::EmptyInput);
}

TEST_CASE("errored user messages are left out of the context") {
  auto c = transcript(1);
  c.messages.insert(c.messages.begin(), {llm::Role::User, "lost", {}, std::nullopt, "E_UPSTREAM: x"});
  CHECK(build_context(c, 2) == "User: user 0");
}

TEST_CASE("aggregate") {
  ConversationReport a, b;
  a.conversation_id = "1";
  a.means = {0.4, 0.2, 1.0};
  b.conversation_id = "2";
  b.means = {0.6, 0.4, 0.0};
  auto t = aggregate({a, b});
  REQUIRE(t.rows.size() == 2);
  CHECK(t.overall.means[0] == doctest::Approx(0.5));
  CHECK(t.overall.means[1] == doctest::Approx(0.3));
  CHECK(t.to_csv() == "case,naturalness,understandability,coherence\n1,0.4000,0.2000,1.0000\n"
                      "2,0.6000,0.4000,0.0000\noverall,0.5000,0.3000,0.5000\n");
  ConversationReport single;
  single.conversation_id = "x";
  single.means = {0.5, 0.5, 0.5};
  CHECK(aggregate({single}).overall.means == DimensionScores{0.5, 0.5, 0.5});
  CHECK(aggregate({}).rows.empty());
}

TEST_CASE("aggregate can leave out the first turn") {
  ConversationReport r;
  r.conversation_id = "c";
  r.turns = {{0, 1, {0.1, 0.1, 0.1}, true}, {1, 3, {0.9, 0.7, 0.5}, false}};
  r.means = r.column_means(false);
  CHECK(aggregate({r}).rows[0].means[0] == doctest::Approx(0.5));
  CHECK(aggregate({r}, true).rows[0].means[0] == doctest::Approx(0.9));
}

TEST_CASE("published table layout is reproduced exactly") {
  const std::vector<std::array<double, 3>> printed = {
      {0.9468, 0.7474, 0.9320}, {0.9549, 0.9585, 0.9403}, {0.9582, 0.9588, 0.9841},
      {0.9582, 0.9588, 0.9841}, {0.9201, 0.9288, 0.7262}, {0.9417, 0.9423, 0.9364},
      {0.8884, 0.8879, 0.9187}, {0.9409, 0.9422, 0.9375}, {0.9601, 0.9576, 0.8673}};
  std::vector<AggregateRow> rows;
  for (std::size_t i = 0; i < printed.size(); ++i) rows.push_back({std::to_string(i + 1), printed[i]});
  const auto table = make_table(rows);
  CHECK(table.to_csv(false) == read_file(std::filesystem::path(KARABO_GOLDEN_DIR) / "table22.csv"));
}

TEST_CASE("clinical term detection") {
  auto m = detect_clinical_terms("I think I have depression");
  REQUIRE(m.size() == 1);
  CHECK(m[0].term == "depression");
  CHECK(m[0].offset == 15);
  CHECK(detect_clinical_terms("I feel tired and heavy").empty());
  auto upper = detect_clinical_terms("ANXIETY attacks");
  REQUIRE(upper.size() == 1);
  CHECK(upper[0].matched == "ANXIETY");
  CHECK(detect_clinical_terms("anxiousness", {"anxious"}).empty());
  auto multi = detect_clinical_terms("a panic attack, then anxiety.");
  REQUIRE(multi.size() == 2);
  CHECK(multi[0].term == "panic attack");
}

TEST_CASE("property: clinical matches never overlap and sit on word boundaries") {
  gen::Rng rng(6);
  const std::vector<std::string> lex = {"feel", "feel tired", "tired", "i", "can't"};
  for (int i = 0; i < 300; ++i) {
    const auto s = gen::sentence(rng, 1, 30);
    const auto ms = detect_clinical_terms(s, lex);
    std::size_t end = 0;
    for (const auto& m : ms) {
      CHECK(m.offset >= end);
      end = m.offset + m.length;
      CHECK(text::ascii_lower(s.substr(m.offset, m.length)) == m.term);
      if (m.offset > 0) CHECK_FALSE(std::isalnum(static_cast<unsigned char>(s[m.offset - 1])));
    }
  }
}

TEST_CASE("scripture detection") {
  auto a = detect_scripture("Remember Philippians 4:6-7 when you worry.");
  REQUIRE(a.size() == 1);
  CHECK(a[0].book == "Philippians");
  CHECK(a[0].chapter == 4);
  CHECK(a[0].verse_start == 6);
  CHECK(a[0].verse_end == 7);
  auto b = detect_scripture("As 1 Corinthians 12:12-14 says");
  REQUIRE(b.size() == 1);
  CHECK(b[0].book == "1 Corinthians");
  CHECK(b[0].chapter == 12);
  CHECK(b[0].verse_start == 12);
  CHECK(b[0].verse_end == 14);
  CHECK(detect_scripture("meet me at 4:6").empty());
  auto c = detect_scripture("John 3:16 and 1 John 4:18, also psalm 23:1");
  REQUIRE(c.size() == 3);
  CHECK(c[0].book == "John");
  CHECK_FALSE(c[0].verse_end);
  CHECK(c[1].book == "1 John");
  CHECK(c[2].book == "Psalm");
  CHECK(c[0].offset < c[1].offset);
  CHECK(c[1].offset < c[2].offset);
  CHECK(detect_scripture("Matthew 11:28\xE2\x80\x93" "30")[0].verse_end == 30);
}

TEST_CASE("proverb detection") {
  const auto reg = adaptation::ProverbRegistry::placeholder();
  const auto seventh = reg.at(7);
  auto hits = detect_proverb("As they say, " + seventh + " Think on it.", reg);
  REQUIRE(hits.size() >= 1);
  CHECK(std::find(hits.begin(), hits.end(), 7u) != hits.end());
  CHECK(detect_proverb("Nothing to see here", reg).empty());
  std::string upper;
  for (char ch : seventh) upper += static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  CHECK(std::find(detect_proverb(upper, reg).begin(), detect_proverb(upper, reg).end(), 7u) !=
        detect_proverb(upper, reg).end());
  adaptation::ProverbRegistry small({"Umuntu ngumuntu ngabantu."});
  CHECK(detect_proverb("umuntu ngumuntu ngabantu", small) == std::vector<std::size_t>{1});
  CHECK(detect_proverb("xumuntu ngumuntu ngabantu", small).empty());
}

TEST_CASE("simplicity metrics") {
  auto m = simplicity_metrics("I am here. You are safe.");
  CHECK(m.sentences == 2);
  CHECK(m.mean_sentence_length_words == 3.0);
  auto e = simplicity_metrics("");
  CHECK(e.empty);
  CHECK(e.mean_sentence_length_words == 0.0);
  CHECK(e.mean_word_length_chars == 0.0);
  CHECK(e.long_word_ratio == 0.0);
  CHECK(simplicity_metrics("hello").mean_word_length_chars == 5.0);
  auto l = simplicity_metrics("Understanding helps. Yes!");
  CHECK(l.long_word_ratio == doctest::Approx(1.0 / 3.0));
  CHECK(simplicity_metrics("...!?").empty);
}

TEST_CASE("likert summary") {
  std::vector<LikertRating> all5;
  for (auto s : kLikertSections) all5.push_back({s, "i", "r", 5});
  auto s5 = likert_summary(all5);
  for (auto s : kLikertSections) CHECK(s5.section(s).mean == 5.0);
  CHECK(s5.overall.mean == 5.0);

  std::vector<LikertRating> two = {{LikertSection::Faith, "a", "r", 3}, {LikertSection::Faith, "b", "r", 4}};
  CHECK(likert_summary(two).section(LikertSection::Faith).mean == 3.5);

  std::vector<LikertRating> zero = {{LikertSection::Ubuntu, "a", "r", 0}};
  CHECK(code_of([&] { likert_summary(zero); }) == ErrorCode::Range);
}

TEST_CASE("property: pooled mean equals weighted section means") {
  gen::Rng rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<LikertRating> ratings;
    std::vector<int> scores;
    const int n = rng.between(1, 60);
    for (int i = 0; i < n; ++i) {
      const int s = rng.between(1, 5);
      ratings.push_back({kLikertSections[rng.index(3)], std::to_string(i), "r" + std::to_string(i % 3), s});
      scores.push_back(s);
    }
    const auto sum = likert_summary(ratings);
    CHECK(std::abs(sum.overall.mean - oracle::pooled_mean(scores)) <= 1e-12);
    double weighted = 0;
    for (auto s : kLikertSections) weighted += sum.section(s).mean * static_cast<double>(sum.section(s).count);
    CHECK(std::abs(weighted / n - sum.overall.mean) <= 1e-12);
  }
}

TEST_CASE("likert CSV parsing") {
  std::istringstream ok("score,section,item_id,rater_id\n4,ubuntu,q1,A\n2,\"faith\",q2,B\n5,integration,q3,C\n");
  auto r = parse_likert_csv(ok);
  REQUIRE(r.size() == 3);
  CHECK(r[0].score == 4);
  CHECK(r[1].section == LikertSection::Faith);
  CHECK(r[2].section == LikertSection::Proverb);
  std::istringstream zero("section,item_id,rater_id,score\nubuntu,q1,A,0\n");
  CHECK(code_of([&] { parse_likert_csv(zero); }) == ErrorCode::Range);
  std::istringstream junk("section,item_id,rater_id,score\nubuntu,q1,A,four\n");
  CHECK(code_of([&] { parse_likert_csv(junk); }) == ErrorCode::Schema);
  std::istringstream nohdr("section,item_id,score\n");
  CHECK(code_of([&] { parse_likert_csv(nohdr); }) == ErrorCode::Schema);
}

TEST_CASE("conversation loading accepts stored and transcript formats") {
  const auto dir = std::filesystem::temp_directory_path() / "karabo_eval_load";
  std::filesystem::create_directories(dir);
  gen::Rng rng(3);
  auto c = gen::conversation(rng);
  {
    std::ofstream(dir / "one.json") << dialogue::to_json(c).dump();
    std::ofstream(dir / "t.jsonl") << "{\"role\":\"user\",\"text\":\"hi\"}\n{\"role\":\"assistant\",\"text\":\"hello\"}\n";
  }
  auto one = load_conversations(dir / "one.json");
  REQUIRE(one.size() == 1);
  CHECK(one[0] == c);
  auto t = load_conversations(dir / "t.jsonl");
  REQUIRE(t.size() == 1);
  CHECK(t[0].id == "t");
  CHECK(t[0].messages.size() == 2);
  std::filesystem::remove_all(dir);
}
