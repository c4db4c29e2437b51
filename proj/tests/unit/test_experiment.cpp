#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "qcawalk/errors.hpp"
#include "qcawalk/experiment.hpp"

using namespace qcaw;
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("qcawalk_test_" + name);
  fs::remove_all(p);
  return p;
}

const char* kNoisy = R"({
  "schema_version": 1,
  "name": "noisy",
  "seed": 3,
  "shots": 200,
  "noise": {"K": 2e5, "delta": 1e5},
  "runs": [
    {"id": "c4", "lattice": {"kind": "cycle", "sizes": [4, 6]}, "variant": "search", "steps": 4,
     "backends": ["density", {"kind": "trajectories", "n_traj": 40}]}
  ]
})";

}  // namespace

TEST(Config, MinimalParses) {
  const auto c = load_config(fs::path(QCAWALK_SOURCE_DIR) / "configs/minimal.json");
  EXPECT_EQ(c.seed, 7u);
  EXPECT_EQ(c.shots, 1000u);
  ASSERT_EQ(c.runs.size(), 1u);
  EXPECT_EQ(c.runs[0].sizes, std::vector<int>{4});
}

TEST(Config, ShippedConfigsValidate) {
  for (const auto& e : fs::directory_iterator(fs::path(QCAWALK_SOURCE_DIR) / "configs")) {
    EXPECT_NO_THROW(expand_points(load_config(e.path()))) << e.path();
  }
}

TEST(Config, UnknownKeyReportsLineAndField) {
  const auto msg = error_of(read_file(fs::path(QCAWALK_TEST_DATA) / "unknown_key.json"));
  EXPECT_NE(msg.find("line 9: field runs[0].colour: unknown key"), std::string::npos) << msg;
}

TEST(Config, TypeAndRangeDiagnostics) {
  EXPECT_NE(error_of(R"({"schema_version": 2, "runs": []})").find("line 1: field schema_version"),
            std::string::npos);
  const std::string bad_size = "{\n\"schema_version\": 1,\n\"runs\": [{\"id\": \"a\",\n"
                               "  \"lattice\": {\"kind\": \"cycle\", \"size\": 5}}]}";
  EXPECT_NE(error_of(bad_size).find("line 4: field runs[0].lattice.size"), std::string::npos)
      << error_of(bad_size);
  const std::string bad_steps = R"({"schema_version": 1, "runs": [{"id": "a",
    "lattice": {"kind": "cycle", "size": 4}, "steps": "many"}]})";
  EXPECT_NE(error_of(bad_steps).find("runs[0].steps: expected an integer"), std::string::npos);
  EXPECT_NE(error_of("{\"schema_version\": 1,\n \"runs\": [}").find("line 2: malformed JSON"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"schema_version": 1})").find("runs: required key missing"), std::string::npos);
}

TEST(Config, SemanticErrorsPointAtRun) {
  const std::string marked = R"({"schema_version": 1, "runs": [{"id": "a",
    "lattice": {"kind": "cycle", "size": 4}, "variant": "search", "marked": 7}]})";
  EXPECT_NE(error_of(marked).find("field runs[0]"), std::string::npos) << error_of(marked);
  const std::string cap = read_file(fs::path(QCAWALK_TEST_DATA) / "density_too_big.json");
  EXPECT_NE(error_of(cap).find("use backend \"trajectories\""), std::string::npos);
  const std::string dup = R"({"schema_version": 1, "runs": [
    {"id": "a", "lattice": {"kind": "cycle", "size": 4}},
    {"id": "a", "lattice": {"kind": "cycle", "size": 4}}]})";
  EXPECT_NE(error_of(dup).find("duplicate run id"), std::string::npos);
}

TEST(Config, HashIgnoresFormatting) {
  const auto a = parse_config(R"({"schema_version": 1, "runs": [{"id": "a", "lattice": {"kind": "cycle", "size": 4}}]})");
  const auto b = parse_config("{\n  \"runs\": [{\"lattice\": {\"size\": 4, \"kind\": \"cycle\"}, \"id\": \"a\"}],\n  \"schema_version\": 1\n}");
  EXPECT_EQ(config_hash(a), config_hash(b));
  EXPECT_EQ(config_hash(a).size(), 16u);
}

TEST(Config, DefaultsFollowLattice) {
  const auto c = parse_config(R"({"schema_version": 1, "runs": [
    {"id": "t", "lattice": {"kind": "torus", "size": 4}, "variant": "search"},
    {"id": "c", "lattice": {"kind": "cycle", "size": 8}}]})");
  const auto pts = expand_points(c);
  ASSERT_EQ(pts.size(), 2u);
  EXPECT_EQ(pts[0].walk.steps, 20);
  EXPECT_EQ(*pts[0].walk.marked, 3);
  EXPECT_EQ(pts[0].walk.init, InitKind::search_uniform);
  EXPECT_EQ(pts[1].walk.steps, 50);
  EXPECT_EQ(pts[1].walk.init, InitKind::symmetric);
  EXPECT_EQ(pts[1].walk.init_vertex, 3);
  EXPECT_EQ(pts[1].walk.shots, 10000u);
}

TEST(Config, NoisyRunsGetAnIdealReference) {
  const auto pts = expand_points(parse_config(kNoisy));
  ASSERT_EQ(pts.size(), 6u);  // 2 sizes x (statevector + density + trajectories)
  EXPECT_EQ(pts[0].walk.backend.kind, BackendKind::statevector);
  EXPECT_EQ(pts[0].walk.noise.relaxation_rate, 0.0);
  EXPECT_EQ(pts[1].walk.noise.relaxation_rate, 2e5);
}

TEST(Config, WorkersFromEnvironment) {
  ::setenv(kWorkersEnv, "3", 1);
  EXPECT_EQ(workers_from_env(), 3);
  ::setenv(kWorkersEnv, "zero", 1);
  EXPECT_THROW(workers_from_env(), ConfigError);
  ::unsetenv(kWorkersEnv);
  EXPECT_EQ(workers_from_env(), 1);
}

TEST(Experiment, MinimalHasStepsPlusOneRecords) {
  const auto c = load_config(fs::path(QCAWALK_SOURCE_DIR) / "configs/minimal.json");
  const auto out = run_experiment(c);
  ASSERT_EQ(out.results["runs"].size(), 1u);
  const auto& run = out.results["runs"][0];
  EXPECT_EQ(run["per_step"].size(), 4u);
  int shots = 0;
  for (const auto& [k, v] : run["per_step"][2]["counts"].items()) shots += v.get<int>();
  EXPECT_EQ(shots, 1000);
}

TEST(Experiment, ByteIdenticalReruns) {
  const auto c = parse_config(kNoisy);
  const auto a = run_experiment(c, 1).results.dump();
  const auto b = run_experiment(c, 1).results.dump();
  const auto w = run_experiment(c, 3).results.dump();
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, w);
}

TEST(Experiment, MetricsAndSweep) {
  const auto out = run_experiment(parse_config(kNoisy));
  const auto& runs = out.results["runs"];
  const auto& density = runs[1];
  EXPECT_EQ(density["backend"]["kind"], "density");
  EXPECT_EQ(density["metrics"]["hellinger_fidelity"].size(), 5u);
  EXPECT_DOUBLE_EQ(density["metrics"]["hellinger_fidelity"][0].get<double>(), 1.0);
  EXPECT_TRUE(density["metrics"].contains("degraded_ratio"));
  EXPECT_EQ(density["metrics"]["reference"], "c4/4-cycle/statevector");
  EXPECT_EQ(out.results["sweeps"].size(), 3u);
  EXPECT_EQ(out.results["sweeps"][0]["points"].size(), 2u);
}

TEST(Experiment, WritesAndReports) {
  const auto dir = scratch("report");
  const auto out = run_experiment(parse_config(kNoisy));
  write_outputs(dir, out);
  EXPECT_TRUE(fs::exists(dir / "results.json"));
  EXPECT_TRUE(fs::exists(dir / "timings.json"));
  const auto files = emit_report(dir);
  EXPECT_EQ(files.series.size(), 6u);
  std::ifstream sweep(files.sweep);
  std::string line;
  int rows = 0;
  while (std::getline(sweep, line)) ++rows;
  EXPECT_EQ(rows, 1 + 3 * 2);  // header + 3 backends x 2 sizes
  std::ifstream series(files.series[0]);
  std::getline(series, line);
  EXPECT_EQ(line, "step,metric,value");
  fs::remove_all(dir);
}

TEST(Experiment, ReportNeedsResults) {
  const auto dir = scratch("empty");
  fs::create_directories(dir);
  EXPECT_THROW(emit_report(dir), ConfigError);
  fs::remove_all(dir);
}
