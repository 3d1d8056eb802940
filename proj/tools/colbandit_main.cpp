#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "colbandit/cli/commands.hpp"

int main(int argc, char** argv) {
  using namespace colbandit::cli;

  CLI::App app{"Adaptive late-interaction reranking with per-cell MaxSim reveals"};
  app.require_subcommand(1);

  RunOptions run_opts;
  std::optional<std::uint64_t> run_seed;
  auto* run = app.add_subcommand("run", "run the configured method over every query");
  run->add_option("--config", run_opts.config, "experiment config (JSON)")->required();
  run->add_option("--seed", run_seed, "override bandit.seed and the synth seed");
  run->add_option("--workers", run_opts.workers, "queries processed in parallel")
      ->check(CLI::PositiveNumber);
  run->add_flag("--trace", run_opts.trace, "include reveal traces in the results file");

  std::string gen_config;
  std::optional<std::uint64_t> gen_seed;
  auto* gen = app.add_subcommand("gen", "write a synthetic dataset");
  gen->add_option("--config", gen_config, "synth spec (JSON)")->required();
  gen->add_option("--seed", gen_seed, "override the spec seed");

  std::string verify_data;
  auto* verify = app.add_subcommand("verify", "check data files and candidate artifacts");
  verify->add_option("data", verify_data, "dataset dir, data file or candidate artifact")
      ->required();

  CLI11_PARSE(app, argc, argv);
  configure_logging();

  if (*run) {
    run_opts.seed = run_seed;
    return cmd_run(run_opts, std::cout, std::cerr);
  }
  if (*gen) return cmd_gen(gen_config, gen_seed, std::cout, std::cerr);
  return cmd_verify(verify_data, std::cout, std::cerr);
}
