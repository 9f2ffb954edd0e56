#pragma once

// JSON documents describing instances and experiments.
//
// Instance:
//   {"kind": "factorized", "exam_probs": [1.0, 0.5], "arm_means": [0.9, 0.8, 0.6]}
//   {"kind": "per_slot", "slot_means": [[0.9, 0.5], [0.7, 0.6], [0.5, 0.3]]}
// slot_means has one row per arm and one column per slot.
//
// Experiment:
//   {
//     "instance": {...},
//     "policy":   {"name": "algorithm1", "params": {"delta": 0.001}},
//     "policies": [{"name": "algorithm1"}, {"name": "ranked_ucb"}],
//     "run":      {"horizon": 1000000, "replications": 50, "master_seed": 7,
//                  "checkpoints": [...], "checkpoints_per_decade": 5, "threads": 0},
//     "output":   {"dir": "out", "csv": "regret.csv", "summary": "summary.json"}
//   }
// "policy" drives `simulate`, "policies" drives `sweep`; at least one is
// required. Unknown fields anywhere are rejected.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "slotbandit/model.hpp"
#include "slotbandit/policies.hpp"
#include "slotbandit/simulation.hpp"

namespace slotbandit {

struct PolicySpec {
  std::string name;
  PolicyParams params;
};

struct RunSpec {
  std::uint64_t horizon = 1000;
  std::vector<std::uint64_t> checkpoints;  // explicit list, or empty
  int checkpoints_per_decade = 5;
  std::size_t replications = 1;
  std::uint64_t master_seed = 0;
  std::size_t threads = 0;
};

struct OutputSpec {
  std::string dir = "out";
  std::string csv = "regret.csv";
  std::string summary = "summary.json";
};

struct ExperimentDocument {
  ProblemInstance instance;
  std::optional<PolicySpec> policy;
  std::vector<PolicySpec> policies;
  RunSpec run;
  OutputSpec output;

  // Run configuration for `spec` with the document's run block.
  RunConfig config_for(const PolicySpec& spec) const;
};

// Parsers throw ValidationError naming the failing field.
ProblemInstance parse_instance(const std::string& text);
ExperimentDocument parse_experiment(const std::string& text);

// Canonical pretty-printed JSON; parse followed by serialize is idempotent.
std::string serialize_instance(const ProblemInstance& instance);
std::string serialize_experiment(const ExperimentDocument& doc);

std::string_view to_string(ExplorationTest test) noexcept;

// Reads a whole file; ValidationError(field) when it cannot be opened.
std::string read_text_file(const std::string& path, const std::string& field);

}  // namespace slotbandit
