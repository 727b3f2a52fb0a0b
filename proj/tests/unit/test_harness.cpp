#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "bmlab/harness/config.hpp"
#include "bmlab/harness/experiments.hpp"
#include "bmlab/harness/output.hpp"

using namespace bmlab::harness;
namespace fs = std::filesystem;

namespace {

std::string temp_dir(const std::string& tag) {
  const auto dir = fs::temp_directory_path() / ("bmlab_test_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir.string();
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("config parsing, typed getters, canonical form") {
  const Config cfg = Config::parse_string(
      "# comment\n[run]\nexperiment = lil\nseed = 42\n\n[subordinator]\nkind = gamma\n"
      "b = 1.5  # trailing comment\n",
      "test.cfg");
  CHECK(cfg.get_string("run", "experiment") == "lil");
  CHECK(cfg.get_u64("run", "seed", 0) == 42);
  CHECK(cfg.get_double("subordinator", "b") == 1.5);
  CHECK(cfg.get_double("subordinator", "beta", 9.0) == 9.0);
  CHECK(cfg.has("subordinator", "kind"));
  CHECK(!cfg.has("subordinator", "nope"));
  const std::string canon = cfg.canonical();
  const Config round = Config::parse_string(canon, "round");
  CHECK(round.canonical() == canon);
}

TEST_CASE("config errors carry line numbers") {
  try {
    Config::parse_string("[run]\nexperiment lil\n", "bad.cfg");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("bad.cfg:2") != std::string::npos);
  }
  try {
    Config::parse_string("[run]\na = 1\na = 2\n", "dup.cfg");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("dup.cfg:3") != std::string::npos);
  }
  CHECK_THROWS_AS(Config::parse_string("key = 1\n", "nosec.cfg"), ConfigError);
}

TEST_CASE("unknown keys are rejected against the schema") {
  const Config cfg = Config::parse_string("[run]\nexperiment = lil\n[bogus]\nx = 1\n");
  const ExperimentDef* def = find_experiment("lil");
  REQUIRE(def != nullptr);
  CHECK_THROWS_AS(cfg.require_known(def->schema), ConfigError);
  const Config cfg2 =
      Config::parse_string("[run]\nexperiment = lil\n[subordinator]\ntypo = 1\n");
  CHECK_THROWS_AS(cfg2.require_known(def->schema), ConfigError);
}

TEST_CASE("registry names every documented experiment") {
  for (const char* name : {"exit-stats", "crossings", "thick-scan", "theta-fit",
                           "covering", "phi-asymptotics", "tail-asymptotics", "lil",
                           "hausdorff-bounds"}) {
    CHECK(find_experiment(name) != nullptr);
  }
  CHECK(find_experiment("no-such") == nullptr);
}

TEST_CASE("zero replicas: assertions vacuously pass, manifest written") {
  const Config cfg = Config::parse_string("[run]\n[exit_stats]\nn = 0\n");
  RunContext ctx;
  ctx.seed = 9;
  ctx.out_dir = temp_dir("vacuous");
  const auto res = run_experiment(*find_experiment("exit-stats"), cfg, ctx);
  CHECK(res.all_pass());
  CHECK(fs::exists(fs::path(ctx.out_dir) / "exit-stats_manifest.jsonl"));
  CHECK(fs::exists(fs::path(ctx.out_dir) / "exit_times.csv"));
}

TEST_CASE("identical configs give bit-identical data files") {
  const Config cfg = Config::parse_string("[run]\n[exit_stats]\nn = 64\ndt = 0.001\n");
  RunContext a, b;
  a.seed = b.seed = 5;
  a.threads = 1;
  b.threads = 2;  // thread budget must not change the data
  a.out_dir = temp_dir("det_a");
  b.out_dir = temp_dir("det_b");
  const auto ra = run_experiment(*find_experiment("exit-stats"), cfg, a);
  const auto rb = run_experiment(*find_experiment("exit-stats"), cfg, b);
  REQUIRE(ra.outputs.size() == rb.outputs.size());
  for (std::size_t i = 0; i < ra.outputs.size(); ++i) {
    CHECK(ra.outputs[i].name == rb.outputs[i].name);
    CHECK(ra.outputs[i].digest == rb.outputs[i].digest);
  }
}

TEST_CASE("manifests of identical runs agree modulo wall time") {
  const Config cfg = Config::parse_string("[run]\n[exit_stats]\nn = 32\ndt = 0.001\n");
  RunContext a, b;
  a.seed = b.seed = 5;
  a.out_dir = temp_dir("mani_a");
  b.out_dir = temp_dir("mani_b");
  run_experiment(*find_experiment("exit-stats"), cfg, a);
  run_experiment(*find_experiment("exit-stats"), cfg, b);
  auto load = [](const std::string& dir) {
    std::ifstream in(fs::path(dir) / "exit-stats_manifest.jsonl");
    nlohmann::json j;
    in >> j;
    j["wall_ms"] = 0.0;
    return j;
  };
  CHECK(load(a.out_dir) == load(b.out_dir));
}

TEST_CASE("csv writer: atomic rename, no tmp left behind") {
  const std::string dir = temp_dir("csv");
  {
    CsvWriter w(dir, "t.csv", {"hello"}, {"a", "b"});
    w.row({"1", "2"});
    CHECK(!fs::exists(fs::path(dir) / "t.csv"));
    CHECK(fs::exists(fs::path(dir) / "t.csv.tmp"));
    w.close();
  }
  CHECK(fs::exists(fs::path(dir) / "t.csv"));
  CHECK(!fs::exists(fs::path(dir) / "t.csv.tmp"));
  std::ifstream in(fs::path(dir) / "t.csv");
  std::string line;
  std::getline(in, line);
  CHECK(line == "# hello");
  std::getline(in, line);
  CHECK(line == "a,b");
  std::getline(in, line);
  CHECK(line == "1,2");
}

TEST_CASE("plotdata: empty rows produce a header-only file") {
  const std::string dir = temp_dir("plot");
  const auto info = write_plotdata(dir, "empty.dat", {"nothing to plot"}, {"x", "y"}, {});
  CHECK(info.bytes > 0);
  std::ifstream in(fs::path(dir) / "empty.dat");
  std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(all == "# nothing to plot\n# columns: x y\n");
}

TEST_CASE("format_double round-trips") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 12345.6789, -0.0}) {
    CHECK(std::stod(format_double(v)) == v);
  }
}

TEST_CASE("fnv digest is stable") {
  const char* s = "bmlab";
  CHECK(hex64(fnv1a64(s, 5)) == hex64(fnv1a64(s, 5)));
  CHECK(fnv1a64("a", 1) != fnv1a64("b", 1));
}

}  // TEST_SUITE
