#pragma once

// Bandit policies for ordered multiple plays.
//
// algorithm1   Asymptotically optimal policy for the factorized (examination
//              x satisfaction) model. Exploits the top-m arms by empirical
//              satisfaction mean, ranked into slots by examination order, and
//              explores one candidate arm per step in the last slot when its
//              KL-UCB index reaches the m-th ranked mean.
// perslot      Variant keeping statistics per (slot, arm) pair. Exploits the
//              maximum-weight assignment of arms to slots under the empirical
//              pair means and explores one (slot, arm) pair per step.
// ranked_ucb   Baseline: top-m arms by KL-UCB index, in slot order.
// oracle       Always plays a fixed optimal list.
// uniform      Uniformly random list.
//
// Each policy alternates decide() and update(); the step counter t passed to
// decide() is the 1-based global step number.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "slotbandit/matrix.hpp"
#include "slotbandit/model.hpp"
#include "slotbandit/random.hpp"

namespace slotbandit {

// Largest q in [mean, 1) with count * kl(mean, q) <= log t + 3 log(max(log t, 1)),
// bracketed to absolute `tolerance` (Newton steps from above with bisection
// fallback). `mean` is clamped to [1e-9, 1 - 1e-9]
// inside the divergence; t is raised to 2 if smaller.
double klucb_index(double mean, std::uint64_t count, std::uint64_t t, double tolerance = 1e-9);

// Exploration budget log t + 3 log(max(log t, 1)).
double klucb_budget(std::uint64_t t);

// What a policy knows about the environment.
struct InstanceShape {
  std::size_t num_arms = 0;
  std::size_t num_slots = 0;
  // Slots by decreasing examination probability.
  std::vector<Slot> slot_order;
  // Smallest examination probability; 1 for per-slot instances.
  double min_exam_prob = 1.0;

  static InstanceShape of(const ProblemInstance& instance);
  bool operator==(const InstanceShape&) const = default;
};

enum class ExplorationTest {
  // Explore pair (k, j) when U_{k,j} >= mean of the greedy arm at slot k.
  kSlotMean,
  // Explore pair (k, j) when U_{k,j} plus the best completion of the other
  // slots under empirical means reaches the greedy list's empirical value.
  kListValue,
};

struct PolicyParams {
  // Algorithm 1 threshold; defaults to p_m / (4 N^2). Must lie in
  // (0, p_m / (2 N^2)).
  std::optional<double> delta;
  double index_tolerance = 1e-9;
  // Rank slots by empirical examination rate instead of the known order.
  bool estimate_slot_order = false;
  ExplorationTest exploration_test = ExplorationTest::kListValue;
};

double default_delta(const InstanceShape& shape);
// Throws ValidationError when `delta` is outside (0, p_m / (2 N^2)).
void check_delta(const InstanceShape& shape, double delta);

struct PolicyDecision {
  ArmList list;
  bool exploring = false;
  std::optional<Arm> explored_arm;
  std::optional<Slot> explored_slot;
};

// Statistics shared by the index policies.
struct PolicyState {
  std::uint64_t step_count = 0;  // completed steps

  // Per arm, from observed satisfaction values r(a_j) only.
  std::vector<std::uint64_t> obs_count;
  std::vector<double> obs_sum;
  std::vector<double> mean;

  // Per (slot, arm), m x N, for the per-slot variant.
  std::vector<std::uint64_t> pair_count;
  Matrix pair_sum;
  Matrix pair_mean;

  // Examination statistics per slot, for slot-order estimation.
  std::vector<std::uint64_t> slot_plays;
  std::vector<std::uint64_t> slot_exams;

  // Per-arm observations still owed by the initialization phase.
  std::vector<std::uint64_t> init_remaining;
  std::size_t init_cursor = 0;

  PolicyState() = default;
  PolicyState(std::size_t num_arms, std::size_t num_slots);

  std::uint64_t pair_observations(Slot k, Arm j) const { return pair_count[k * obs_count.size() + j]; }
  bool arm_init_complete() const;
  bool pair_init_complete() const;
};

// Records the feedback of the list in `decision`: each examined slot yields
// one observation of its arm. Advances step_count.
void record_observation(PolicyState& state, const PolicyDecision& decision, const Observation& obs);

// Slots ordered by decreasing importance: the known order, or the empirical
// examination rate when `estimate` is set (ties by slot id).
std::vector<Slot> effective_slot_order(const PolicyState& state, const InstanceShape& shape, bool estimate);

// One step of Algorithm 1 after initialization. `slot_order` lists the slots
// by decreasing examination probability. Draws from `rng` only to pad the
// candidate set when fewer than m arms are well observed. Throws
// ProtocolError if some arm has fewer than m observations.
PolicyDecision algorithm1_decide(const PolicyState& state, const InstanceShape& shape,
                                 const std::vector<Slot>& slot_order, double delta, std::uint64_t t,
                                 Rng& rng, double index_tolerance = 1e-9);

void algorithm1_update(PolicyState& state, const PolicyDecision& decision, const Observation& obs);

// One step of the per-slot variant after every (slot, arm) pair has been
// observed once. Throws ProtocolError otherwise.
PolicyDecision perslot_decide(const PolicyState& state, const InstanceShape& shape, std::uint64_t t,
                              ExplorationTest test = ExplorationTest::kListValue,
                              double index_tolerance = 1e-9);

// Top-m arms by KL-UCB index, ties by arm id. Needs one observation per arm.
PolicyDecision ranked_ucb_decide(const PolicyState& state, const InstanceShape& shape,
                                 const std::vector<Slot>& slot_order, std::uint64_t t,
                                 double index_tolerance = 1e-9);

class Policy {
 public:
  virtual ~Policy() = default;

  virtual std::string_view name() const = 0;
  virtual const InstanceShape& shape() const = 0;
  virtual const PolicyDecision& decide(std::uint64_t t, Rng& rng) = 0;
  virtual void update(const Observation& obs) = 0;
  // True once the initialization phase is over.
  virtual bool initialized() const { return true; }
  virtual const PolicyState* state() const { return nullptr; }
};

inline constexpr std::string_view kPolicyNames[] = {"algorithm1", "perslot", "ranked_ucb", "oracle", "uniform"};

bool is_policy_name(std::string_view name);

// Throws ValidationError for unknown names or out-of-range parameters.
std::unique_ptr<Policy> make_policy(std::string_view name, const ProblemInstance& instance,
                                    const PolicyParams& params = {});

}  // namespace slotbandit
