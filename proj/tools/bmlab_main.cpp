#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdlib>
#include <string>

#include "bmlab/harness/config.hpp"
#include "bmlab/harness/experiments.hpp"

// bmlab <experiment> --config FILE [--seed N] [--threads N] [--out DIR]
// bmlab list
// bmlab verify --config FILE
//
// exit codes: 0 pass, 1 assertion failure, 2 usage/config error

namespace {

using bmlab::harness::Config;
using bmlab::harness::ExperimentDef;
using bmlab::harness::RunContext;

int run_command(const std::string& command, const std::string& config_path,
                uint64_t seed_cli, bool seed_set, int threads_cli, bool threads_set,
                const std::string& out_cli) {
  if (command == "list") {
    for (const auto& def : bmlab::harness::experiments())
      fmt::print("{:<18} {}\n", def.name, def.description);
    return 0;
  }

  Config cfg = config_path.empty() ? Config::parse_string("[run]\n", "<empty>")
                                   : Config::parse_file(config_path);

  std::string experiment_name;
  if (command == "verify") {
    if (!cfg.has("run", "experiment"))
      throw bmlab::harness::ConfigError("verify: config must name run.experiment");
    experiment_name = cfg.get_string("run", "experiment");
  } else {
    experiment_name = command;
    if (cfg.has("run", "experiment") && cfg.get_string("run", "experiment") != command)
      throw bmlab::harness::ConfigError(
          fmt::format("config names experiment '{}' but '{}' was requested",
                      cfg.get_string("run", "experiment"), command));
  }

  const ExperimentDef* def = bmlab::harness::find_experiment(experiment_name);
  if (!def)
    throw bmlab::harness::ConfigError(
        fmt::format("unknown experiment '{}'; try 'bmlab list'", experiment_name));

  RunContext ctx;
  ctx.seed = seed_set ? seed_cli : cfg.get_u64("run", "seed", 1);
  ctx.threads = threads_set ? threads_cli
                            : static_cast<int>(cfg.get_long("run", "threads", 1));
  if (ctx.threads < 1) ctx.threads = 1;
  ctx.write_outputs = command != "verify";
  const char* env_out = std::getenv("BMLAB_OUT");
  ctx.out_dir = !out_cli.empty()  ? out_cli
                : env_out         ? std::string(env_out)
                                  : cfg.get_string("run", "out", "out");

  const auto res = bmlab::harness::run_experiment(*def, cfg, ctx);
  for (const auto& a : res.assertions)
    fmt::print("[{}] {}: {}{}\n", a.pass ? "PASS" : "FAIL", experiment_name, a.name,
               a.detail.empty() ? "" : "  (" + a.detail + ")");
  if (ctx.write_outputs)
    for (const auto& o : res.outputs)
      fmt::print("wrote {}/{} ({} bytes)\n", ctx.out_dir, o.name, o.bytes);
  return res.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bmlab: Monte-Carlo and quadrature laboratory for planar Brownian "
               "visit statistics"};
  std::string command;
  std::string config_path;
  std::string out_dir;
  uint64_t seed = 0;
  int threads = 0;
  app.add_option("command", command,
                 "experiment name, 'list', or 'verify' (see 'bmlab list')")
      ->required();
  const auto* seed_opt = app.add_option("--seed", seed, "master seed");
  const auto* threads_opt = app.add_option("--threads", threads, "worker thread budget");
  app.add_option("--config", config_path, "configuration file");
  app.add_option("--out", out_dir, "output directory (overrides BMLAB_OUT and config)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    return run_command(command, config_path, seed, seed_opt->count() > 0, threads,
                       threads_opt->count() > 0, out_dir);
  } catch (const bmlab::harness::ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 2;
  }
}
