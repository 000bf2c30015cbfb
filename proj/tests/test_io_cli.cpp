#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <string>

#include "ips/cli.hpp"
#include "ips/errors.hpp"
#include "ips/io.hpp"
#include "ips/sim.hpp"

using namespace ips;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("ips_test_" + std::to_string(std::rand()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

const char* kGraphJson = R"({"vertices":[{"id":0,"mark":1},{"id":1,"mark":0},{"id":2,"mark":0}],
                             "edges":[[0,1],[1,2]]})";

}  // namespace

TEST_CASE("graph loader validates") {
  CHECK(graph_from_json(nlohmann::json::parse(kGraphJson)).size() == 3);
  const auto reject = [](const char* text) {
    CHECK_THROWS_AS(graph_from_json(nlohmann::json::parse(text)), input_error);
  };
  reject(R"({"vertices":[{"id":0,"mark":0},{"id":0,"mark":0}],"edges":[]})");       // dup id
  reject(R"({"vertices":[{"id":0,"mark":0},{"id":2,"mark":0}],"edges":[]})");       // not dense
  reject(R"({"vertices":[{"id":0,"mark":0}],"edges":[[0,0]]})");                    // self loop
  reject(R"({"vertices":[{"id":0,"mark":0},{"id":1,"mark":0}],"edges":[[0,1],[1,0]]})");
  reject(R"({"vertices":[{"id":0,"mark":0}],"edges":[[0,3]]})");                    // unknown id
  reject(R"({"vertices":[{"id":0}],"edges":[]})");                                  // missing mark
}

TEST_CASE("graph json round trip") {
  const MarkedGraph g = graph_from_json(nlohmann::json::parse(kGraphJson));
  const MarkedGraph g2 = graph_from_json(graph_to_json(g));
  CHECK(g2.size() == g.size());
  CHECK(g2.edges() == g.edges());
  CHECK(g2.mark(0) == Mark(1));
}

TEST_CASE("model config parsing") {
  CHECK(model_from_json(nlohmann::json::parse(R"({"name":"counterexample"})")).name ==
        "counterexample");
  const Model c = model_from_json(
      nlohmann::json::parse(R"({"name":"contact","params":{"lambda":1.5,"mu":1.0}})"));
  CHECK(c.params["lambda"] == 1.5);
  CHECK_THROWS_AS(model_from_json(nlohmann::json::parse(R"({"noname":1})")), input_error);
  CHECK_THROWS_AS(model_from_json(nlohmann::json::parse(R"({"name":"contact"})")), input_error);
}

TEST_CASE("trajectory logs round trip and self-check") {
  const MarkedGraph g = counterexample_graph();
  const Model m = make_counterexample_model();
  const auto draw = sample_replicate(g, m, counterexample_marks(), 1.0, VertexSet{}, 99);
  const std::string text = trajectory_to_jsonl(draw.traj, 99);
  const Trajectory back = trajectory_from_jsonl(text);
  CHECK(back.horizon == draw.traj.horizon);
  CHECK(back.initial == draw.traj.initial);
  REQUIRE(back.events.size() == draw.traj.events.size());
  for (std::size_t i = 0; i < back.events.size(); ++i)
    CHECK(back.events[i].t == draw.traj.events[i].t);

  // corrupting a state is caught on load
  std::string corrupted = text;
  const auto pos = corrupted.find("\"s\":1");
  if (pos != std::string::npos) {
    corrupted.replace(pos, 5, "\"s\":7");
    CHECK_THROWS_AS(trajectory_from_jsonl(corrupted), input_error);
  }
}

TEST_CASE("marks sampler config") {
  const MarkedGraph g = counterexample_graph();
  const auto j = nlohmann::json::parse(
      R"({"default":{"type":"bernoulli","p":0.5},"overrides":{"1":{"type":"fixed","value":0}}})");
  const MarksSampler s = marks_sampler_from_json(j, g);
  Rng rng(3);
  for (int i = 0; i < 20; ++i) CHECK(s.sample(rng)[1] == Mark(0));
  CHECK_THROWS_AS(
      marks_sampler_from_json(nlohmann::json::parse(R"({"type":"prior"})"), g), input_error);
  CHECK_THROWS_AS(
      marks_sampler_from_json(
          nlohmann::json::parse(R"({"default":{"type":"fixed","value":0},
                                    "overrides":{"9":{"type":"fixed","value":0}}})"),
          g),
      input_error);
}

TEST_CASE("cli exit codes") {
  TempDir dir;
  write_text_file(dir.file("g.json"), kGraphJson);
  write_text_file(dir.file("m.json"), R"({"name":"counterexample"})");
  write_text_file(dir.file("bad.json"), R"({"name":"contact","params":{"lambda":1.0}})");

  CHECK(run_cli({"validate-model", "--model", dir.file("m.json"), "--graph", dir.file("g.json")}) == 0);
  CHECK(run_cli({"validate-model", "--model", dir.file("bad.json")}) == 2);  // missing mu
  CHECK(run_cli({"bogus-subcommand"}) == 2);
  CHECK(run_cli({"simulate", "--graph", dir.file("g.json")}) == 2);  // missing required flags
  CHECK(run_cli({"weight", "--graph", dir.file("g.json"), "--model", dir.file("m.json"),
                 "--traj", dir.file("missing.jsonl"), "--w", "1", "--t", "0.5"}) == 2);
}

TEST_CASE("cli simulate is deterministic across thread counts") {
  TempDir dir;
  write_text_file(dir.file("g.json"), kGraphJson);
  write_text_file(dir.file("m.json"), R"({"name":"counterexample"})");
  const auto run_sim = [&](const std::string& out, const std::string& threads) {
    REQUIRE(run_cli({"simulate", "--graph", dir.file("g.json"), "--model", dir.file("m.json"),
                     "--horizon", "1.0", "--frozen", "1", "--reps", "6", "--seed", "33",
                     "--threads", threads, "--out", dir.file(out)}) == 0);
  };
  run_sim("a", "1");
  run_sim("b", "3");
  for (int k = 0; k < 6; ++k) {
    char name[32];
    std::snprintf(name, sizeof(name), "rep_%06d.jsonl", k);
    CHECK(read_text_file((fs::path(dir.file("a")) / name).string()) ==
          read_text_file((fs::path(dir.file("b")) / name).string()));
  }
}

TEST_CASE("cli oracle and mrf-test run end to end") {
  TempDir dir;
  write_text_file(dir.file("g.json"), kGraphJson);
  write_text_file(dir.file("m.json"), R"({"name":"counterexample"})");
  write_text_file(dir.file("marks.json"),
                  R"({"default":{"type":"bernoulli","p":0.5},
                      "overrides":{"1":{"type":"fixed","value":0}}})");
  CHECK(run_cli({"oracle", "--graph", dir.file("g.json"), "--model", dir.file("m.json"),
                 "--marks", dir.file("marks.json"), "--grid", "1.0", "--cmi", "A=0;B=2;S=1"}) == 0);
  // the counterexample rejects, so --expect-pass must exit 1
  CHECK(run_cli({"mrf-test", "--graph", dir.file("g.json"), "--model", dir.file("m.json"),
                 "--marks", dir.file("marks.json"), "--alpha", "1", "--t", "1.0", "--samples",
                 "20000", "--seed", "9", "--perms", "399", "--threads", "2", "--expect-pass",
                 "--out", dir.file("report.csv")}) == 1);
  const std::string csv = read_text_file(dir.file("report.csv"));
  CHECK(csv.find("A,B,S,alpha,cmi") == 0);
}
