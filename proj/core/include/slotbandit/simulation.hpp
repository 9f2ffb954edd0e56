#pragma once

// Policy-versus-instance episodes with pseudo-regret accounting, seeded
// replications and their aggregation.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "slotbandit/divergence.hpp"
#include "slotbandit/model.hpp"
#include "slotbandit/policies.hpp"

namespace slotbandit {

struct RunConfig {
  std::uint64_t horizon = 1000;
  // Increasing steps in [1, horizon]. Empty means default_checkpoints(horizon).
  std::vector<std::uint64_t> checkpoints;
  std::size_t replications = 1;
  std::uint64_t master_seed = 0;
  std::string policy = "algorithm1";
  PolicyParams params;
  // Keep N_t(pi) at every checkpoint (memory: checkpoints x lists).
  bool record_checkpoint_counts = false;
  // Worker threads for replications; 0 picks the hardware concurrency.
  std::size_t threads = 0;
};

// Log-spaced steps from 10^3 (or 10 when horizon < 1000) to horizon,
// `per_decade` per factor of ten, always ending at horizon.
std::vector<std::uint64_t> default_checkpoints(std::uint64_t horizon, int per_decade = 5);

// Throws ValidationError naming the offending field.
void validate(const RunConfig& config);

struct RunResult {
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> checkpoints;
  // Pseudo-regret sum_pi N_t(pi) Reg(pi) at each checkpoint, summed in list order.
  std::vector<double> regret;
  // Step-by-step running sum of Reg(pi_t), for cross-checking `regret`.
  std::vector<double> running_regret;
  // Reg_t / log t; 0 at t = 1.
  std::vector<double> regret_over_log;

  std::vector<std::uint64_t> list_plays;       // N_T(pi), lexicographic list order
  std::vector<std::uint64_t> slot_arm_plays;   // N_T(k, j), m x N row-major
  std::vector<std::uint64_t> arm_observations; // N*_T(j)
  std::uint64_t init_steps = 0;
  std::uint64_t exploration_steps = 0;
  // N_t(pi) per checkpoint when requested.
  std::vector<std::vector<std::uint64_t>> checkpoint_list_plays;

  std::uint64_t slot_arm(Slot k, Arm j, std::size_t num_arms) const { return slot_arm_plays[k * num_arms + j]; }
  bool operator==(const RunResult&) const = default;
};

// One episode with `seed`. Every step: decide, sample, update, charge Reg(pi_t).
// Init-phase steps are counted in the horizon and charged like any other.
RunResult run_episode(const ProblemInstance& instance, const RegretTable& regrets, Policy& policy,
                      const RunConfig& config, std::uint64_t seed);

// Builds the policy from `config` and runs with seed derive_seed(master_seed, 0).
RunResult run_episode(const ProblemInstance& instance, const RunConfig& config);

struct AggregateResult {
  std::vector<std::uint64_t> checkpoints;
  std::vector<double> regret_mean;
  std::vector<double> regret_stderr;
  std::vector<double> ratio_mean;
  std::vector<double> ratio_stderr;
  // Means over replications of the final counters.
  std::vector<double> list_plays_mean;
  std::vector<double> slot_arm_plays_mean;  // m x N
  std::vector<double> arm_observations_mean;
  double slope = 0.0;  // slope_estimate of regret_mean, when defined
  bool slope_defined = false;
  std::vector<RunResult> runs;  // by replication index
};

// Mean and standard error per checkpoint; the reduction runs in replication
// index order, independent of thread scheduling.
AggregateResult aggregate(std::vector<RunResult> runs);

// Replication r uses derive_seed(master_seed, r).
AggregateResult run_replicated(const ProblemInstance& instance, const RunConfig& config);

// Least-squares slope of regret against log t over checkpoints in the final
// decade [t_last / 10, t_last]. Needs at least 3 such checkpoints.
double slope_estimate(std::span<const std::uint64_t> checkpoints, std::span<const double> regret);

}  // namespace slotbandit
