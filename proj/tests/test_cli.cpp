#include <doctest.h>

#include <httplib.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "karabo/cli.hpp"
#include "karabo/corpus/corpus.hpp"
#include "support/generators.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = karabo::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path fresh_dir(const std::string& name) {
  auto d = fs::temp_directory_path() / ("karabo_cli_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<json> jsonl(const fs::path& p) {
  std::vector<json> rows;
  std::istringstream in(slurp(p));
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) rows.push_back(json::parse(line));
  return rows;
}

fs::path write_instances(const fs::path& dir, std::size_t n) {
  gen::Rng rng(31);
  const auto p = dir / "instances.jsonl";
  std::ofstream o(p);
  for (const auto& t : gen::instances(rng, n)) o << karabo::corpus::to_json(t).dump() << "\n";
  return p;
}

}  // namespace

TEST_CASE("usage errors exit 2") {
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"adapt"}).code == 2);
  CHECK(run({"report", "/nonexistent/path"}).code == 2);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("adapt writes instances, traces and stats") {
  const auto dir = fresh_dir("adapt");
  const auto input = write_instances(dir, 12);
  auto r = run({"adapt", input.string(), (dir / "out").string(), "--mock", "identity", "--seed", "7"});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const auto adapted = jsonl(dir / "out" / "adapted.jsonl");
  const auto traces = jsonl(dir / "out" / "traces.jsonl");
  CHECK(adapted.size() == 12);
  CHECK(traces.size() == 12);
  const auto stats = json::parse(slurp(dir / "out" / "stats.json"));
  CHECK(stats.is_object());
  CHECK(fs::exists(dir / "out" / "usage.json"));
  const auto originals = jsonl(input);
  for (std::size_t i = 0; i < 12; ++i) CHECK(adapted[i]["client_text"] == originals[i]["client_text"]);

  auto again = run({"adapt", input.string(), (dir / "out2").string(), "--mock", "identity", "--seed", "7",
                    "--workers", "3"});
  REQUIRE(again.code == 0);
  CHECK(slurp(dir / "out" / "adapted.jsonl") == slurp(dir / "out2" / "adapted.jsonl"));
  CHECK(slurp(dir / "out" / "traces.jsonl") == slurp(dir / "out2" / "traces.jsonl"));
  fs::remove_all(dir);
}

TEST_CASE("preprocess then adapt from session records") {
  const auto dir = fresh_dir("pre");
  gen::Rng rng(2);
  {
    std::ofstream o(dir / "sessions.jsonl");
    for (int i = 0; i < 10; ++i)
      o << gen::record_json(rng, "s" + std::to_string(i), gen::dialogue(rng), rng.pick(gen::technique_labels())).dump()
        << "\n";
  }
  auto r = run({"preprocess", (dir / "sessions.jsonl").string(), (dir / "pre").string()});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(fs::exists(dir / "pre" / "instances.jsonl"));
  CHECK(json::parse(slurp(dir / "pre" / "balance.json")).is_object());
  fs::remove_all(dir);
}

TEST_CASE("runtime failures exit 1 with a JSON error") {
  const auto dir = fresh_dir("fail");
  {
    std::ofstream(dir / "bad.jsonl") << "{not json\n";
  }
  auto r = run({"adapt", (dir / "bad.jsonl").string(), (dir / "out").string(), "--mock", "identity"});
  CHECK(r.code == 1);
  auto trimmed = r.err.substr(0, r.err.find_last_not_of('\n') + 1);
  auto err = json::parse(trimmed.substr(trimmed.rfind('\n') + 1));
  CHECK(err.contains("error"));
  CHECK(err["error"]["code"].get<std::string>().rfind("E_", 0) == 0);
  fs::remove_all(dir);
}

TEST_CASE("evaluate and report") {
  const auto dir = fresh_dir("eval");
  {
    std::ofstream(dir / "t.jsonl") << "{\"role\":\"user\",\"text\":\"hi\"}\n{\"role\":\"assistant\",\"text\":\"hello\"}\n"
                                      "{\"role\":\"user\",\"text\":\"sad\"}\n{\"role\":\"assistant\",\"text\":\"I hear you\"}\n";
  }
  auto e = run({"evaluate", (dir / "t.jsonl").string(), "-o", (dir / "reports").string(), "--mock",
                "constant:0.4,0.1"});
  REQUIRE_MESSAGE(e.code == 0, e.err);
  CHECK(fs::exists(dir / "reports" / "report-t.json"));
  auto rep = run({"report", (dir / "reports").string(), "--format", "csv"});
  REQUIRE(rep.code == 0);
  CHECK(rep.out.rfind("case,naturalness,understandability,coherence\n", 0) == 0);
  CHECK(rep.out.find("t,0.8000,0.8000,0.8000") != std::string::npos);
  auto rj = run({"report", (dir / "reports").string(), "--format", "json"});
  REQUIRE(rj.code == 0);
  CHECK(json::parse(rj.out).is_object());
  fs::remove_all(dir);
}

TEST_CASE("likert") {
  const auto dir = fresh_dir("likert");
  {
    std::ofstream(dir / "r.csv") << "section,item_id,rater_id,score\nubuntu,1,a,5\nfaith,2,a,4\nproverb,3,b,3\n";
    std::ofstream(dir / "bad.csv") << "section,item_id,rater_id,score\nubuntu,1,a,6\n";
  }
  auto r = run({"likert", (dir / "r.csv").string()});
  REQUIRE(r.code == 0);
  auto j = json::parse(r.out);
  CHECK(j["overall"]["mean"].get<double>() == doctest::Approx(4.0));
  CHECK(run({"likert", (dir / "bad.csv").string()}).code == 1);
  fs::remove_all(dir);
}

TEST_CASE("export-finetune") {
  const auto dir = fresh_dir("ft");
  const auto input = write_instances(dir, 5);
  auto r = run({"export-finetune", input.string(), (dir / "ft").string()});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const auto rows = jsonl(dir / "ft" / "training.jsonl");
  REQUIRE(rows.size() == 5);
  CHECK(rows[0]["messages"].size() == 3);
  const auto manifest = json::parse(slurp(dir / "ft" / "manifest.json"));
  CHECK(manifest["base_model"] == "gpt-4o-mini-2024-07-18");
  CHECK(manifest["epochs"] == 3);
  CHECK(manifest["batch_size"] == 11);
  CHECK(manifest["lr_multiplier"].get<double>() == doctest::Approx(1.8));
  CHECK(manifest["seed"] == 2038458019);
  fs::remove_all(dir);
}

TEST_CASE("replay-cases prints nine rows") {
  auto r = run({"replay-cases", "--mock", "echo", "--mock", "eval=constant:0.9,0.1"});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  std::istringstream in(r.out);
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  REQUIRE(lines.size() == 10);
  CHECK(lines[0] == "case,naturalness,understandability,coherence");
  CHECK(lines[9] == "9,0.9000,0.9000,0.9000");
}

TEST_CASE("serve answers over HTTP") {
  const auto dir = fresh_dir("serve");
  int pipefd[2];
  REQUIRE(pipe(pipefd) == 0);
  const pid_t pid = fork();
  REQUIRE(pid >= 0);
  if (pid == 0) {
    dup2(pipefd[1], STDOUT_FILENO);
    close(pipefd[0]);
    const std::string data = dir.string();
    execl(KARABO_BIN, KARABO_BIN, "serve", "--port", "0", "--data-dir", data.c_str(), "--mock", "echo",
          static_cast<char*>(nullptr));
    _exit(127);
  }
  close(pipefd[1]);
  std::string line;
  char ch;
  while (read(pipefd[0], &ch, 1) == 1 && ch != '\n') line += ch;
  close(pipefd[0]);
  const auto colon = line.rfind(':');
  REQUIRE_MESSAGE(line.rfind("listening on http://", 0) == 0, line);
  const int port = std::stoi(line.substr(colon + 1));
  httplib::Client cli("127.0.0.1", port);
  auto created = cli.Post("/api/conversations", R"({"language":"isizulu"})", "application/json");
  REQUIRE(created);
  CHECK(created->status == 200);
  const auto id = json::parse(created->body)["id"].get<std::string>();
  CHECK(json::parse(created->body)["greeting"] == "Sawubona, nginguKarabo");
  auto msg = cli.Post("/api/conversations/" + id + "/messages", R"({"text":"hello"})", "application/json");
  REQUIRE(msg);
  CHECK(json::parse(msg->body)["assistant_text"] == "[MOCK]hello");
  kill(pid, SIGTERM);
  int status = 0;
  waitpid(pid, &status, 0);
  fs::remove_all(dir);
}
