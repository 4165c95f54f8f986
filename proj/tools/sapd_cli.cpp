#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "sapd/cli.hpp"

namespace {

struct CommonArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> threads;
};

void add_common(CLI::App* cmd, CommonArgs& a) {
  cmd->add_option("--config", a.config, "config file path")->required();
  cmd->add_option("--seed", a.seed, "override experiment.master_seed");
  cmd->add_option("--out", a.out, "override output.dir");
  cmd->add_option("--threads", a.threads, "override experiment.threads");
}

sapd::RunConfig load_with_overrides(const CommonArgs& a) {
  sapd::RunConfig cfg = sapd::load_config(a.config);
  if (a.seed) cfg.experiment.master_seed = *a.seed;
  if (a.out) cfg.output.dir = *a.out;
  if (a.threads) {
    if (*a.threads < 1) throw sapd::ConfigError("--threads must be positive");
    cfg.experiment.threads = *a.threads;
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stochastic saddle point solvers"};
  app.require_subcommand(1);

  CommonArgs va, ra, ba, fa;
  CLI::App* verify =
      app.add_subcommand("verify", "check step-size admissibility");
  add_common(verify, va);
  CLI::App* run = app.add_subcommand("run", "Monte Carlo solver comparison");
  add_common(run, ra);
  CLI::App* bias =
      app.add_subcommand("bias-scan", "stationary bias against theta");
  add_common(bias, ba);
  CLI::App* ref =
      app.add_subcommand("reference", "high-accuracy saddle point");
  add_common(ref, fa);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;  // bad flags are configuration errors
  }

  return sapd::run_cli_action([&]() -> int {
    if (*verify) return sapd::cmd_verify(load_with_overrides(va), std::cout);
    if (*run) return sapd::cmd_run(load_with_overrides(ra), std::cout);
    if (*bias) return sapd::cmd_bias_scan(load_with_overrides(ba), std::cout);
    return sapd::cmd_reference(load_with_overrides(fa), std::cout);
  });
}
