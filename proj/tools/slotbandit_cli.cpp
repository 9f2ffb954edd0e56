// slotbandit: lower bounds and simulations for bandits with ordered
// multiple plays.
//
//   slotbandit bounds <instance.json> [--out DIR]
//   slotbandit simulate <experiment.json> [--out DIR] [--seed S] [--replications R] [--horizon T]
//   slotbandit sweep <experiment.json> [same flags]
//   slotbandit lemma2 --m M --trials K --seed S [--out DIR]

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "slotbandit/report.hpp"

namespace {

void add_override_flags(CLI::App* cmd, slotbandit::CommandOptions& opts) {
  cmd->add_option("--out", opts.out_dir, "Output directory (overrides output.dir)");
  cmd->add_option("--seed", opts.seed, "Master seed (overrides run.master_seed)");
  cmd->add_option("--replications", opts.replications, "Replications (overrides run.replications)");
  cmd->add_option("--horizon", opts.horizon, "Horizon T (overrides run.horizon)");
  cmd->add_option("--threads", opts.threads, "Worker threads, 0 = all cores (overrides run.threads)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Regret lower bounds and simulations for multi-armed bandits with ordered multiple plays"};
  app.require_subcommand(1);

  slotbandit::CommandOptions opts;
  std::string path;

  auto* bounds = app.add_subcommand("bounds", "Compute the asymptotic regret lower bounds of an instance");
  bounds->add_option("instance", path, "Instance document (JSON)")->required();
  bounds->add_option("--out", opts.out_dir, "Directory for <instance>_bounds.json (default: out)");

  auto* simulate = app.add_subcommand("simulate", "Run replicated episodes of one policy; write a regret CSV");
  simulate->add_option("experiment", path, "Experiment document (JSON)")->required();
  add_override_flags(simulate, opts);

  auto* sweep = app.add_subcommand("sweep", "Run several policies on one instance; one CSV per policy");
  sweep->add_option("experiment", path, "Experiment document (JSON)")->required();
  add_override_flags(sweep, opts);

  std::uint64_t m = 0;
  std::uint64_t trials = 100;
  std::uint64_t seed = 0;
  auto* lemma2 = app.add_subcommand("lemma2", "Check that closing one slot per step is optimal, exhaustively");
  lemma2->add_option("--m", m, "Number of slots and objects (1..4)")->required();
  lemma2->add_option("--trials", trials, "Random reward matrices")->capture_default_str();
  lemma2->add_option("--seed", seed, "Seed")->capture_default_str();
  lemma2->add_option("--out", opts.out_dir, "Directory for lemma2.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : slotbandit::kExitValidation;
  }

  if (*bounds) return slotbandit::cmd_bounds(path, opts, std::cout, std::cerr);
  if (*simulate) return slotbandit::cmd_simulate(path, opts, std::cout, std::cerr);
  if (*sweep) return slotbandit::cmd_sweep(path, opts, std::cout, std::cerr);
  if (*lemma2) return slotbandit::cmd_lemma2(m, trials, seed, opts, std::cout, std::cerr);
  return slotbandit::kExitValidation;
}
