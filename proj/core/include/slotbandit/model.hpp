#pragma once

// Bandit instances with m ordered slots and N arms, arm lists, expected list
// rewards and stochastic feedback.
//
// Arms and slots are 0-based in the API. Slot 0 is the most examined slot.
// Serialized documents and reports use 1-based ids.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "slotbandit/matrix.hpp"
#include "slotbandit/random.hpp"

namespace slotbandit {

using Arm = std::size_t;
using Slot = std::size_t;

enum class InstanceKind { kFactorized, kPerSlot };

std::string_view to_string(InstanceKind kind) noexcept;

// Ordered assignment of distinct arms to the m slots; position k holds the
// arm shown in slot k.
class ArmList {
 public:
  ArmList() = default;
  explicit ArmList(std::vector<Arm> arms) : arms_(std::move(arms)) {}
  ArmList(std::initializer_list<Arm> arms) : arms_(arms) {}

  std::size_t size() const noexcept { return arms_.size(); }
  Arm operator[](Slot k) const { return arms_[k]; }
  Arm& operator[](Slot k) { return arms_[k]; }
  const std::vector<Arm>& arms() const noexcept { return arms_; }
  auto begin() const noexcept { return arms_.begin(); }
  auto end() const noexcept { return arms_.end(); }

  bool contains(Arm a) const noexcept;
  std::optional<Slot> slot_of(Arm a) const noexcept;
  bool has_distinct_arms() const;

  auto operator<=>(const ArmList&) const = default;

 private:
  std::vector<Arm> arms_;
};

struct ValidationOptions {
  // Means exactly 0 or 1. Only meant for degenerate test environments; KL
  // based quantities are undefined on such instances.
  bool allow_boundary_means = false;
  // Permit p_k == p_{k+1}.
  bool allow_tied_exam_probs = false;
};

class ProblemInstance {
 public:
  // Position-based model: slot k is examined with probability p_k, arm j
  // satisfies with probability mu_j, a click needs both.
  static ProblemInstance factorized(std::vector<double> exam_probs, std::vector<double> arm_means,
                                    ValidationOptions options = {});

  // Independent Bernoulli reward with mean theta(j, k) for arm j in slot k.
  // `slot_means` is N x m.
  static ProblemInstance per_slot(Matrix slot_means, ValidationOptions options = {});

  InstanceKind kind() const noexcept { return kind_; }
  std::size_t num_arms() const noexcept { return num_arms_; }
  std::size_t num_slots() const noexcept { return num_slots_; }

  // FACTORIZED only; empty otherwise.
  const std::vector<double>& exam_probs() const noexcept { return exam_probs_; }
  const std::vector<double>& arm_means() const noexcept { return arm_means_; }
  // N x m matrix of E F(k, a_j). Filled for both kinds.
  const Matrix& slot_means() const noexcept { return slot_means_; }

  double slot_mean(Slot k, Arm j) const { return slot_means_(j, k); }

  bool valid_list(const ArmList& list) const;
  // Throws InvalidListError unless `list` has m distinct arms in range.
  void check_list(const ArmList& list) const;

 private:
  ProblemInstance() = default;

  InstanceKind kind_ = InstanceKind::kFactorized;
  std::size_t num_arms_ = 0;
  std::size_t num_slots_ = 0;
  std::vector<double> exam_probs_;
  std::vector<double> arm_means_;
  Matrix slot_means_;
};

// Number of lists, N (N-1) ... (N-m+1).
std::uint64_t count_lists(std::size_t num_arms, std::size_t num_slots);

// All lists in lexicographic order.
std::vector<ArmList> enumerate_lists(const ProblemInstance& instance);
std::vector<ArmList> enumerate_lists(std::size_t num_arms, std::size_t num_slots);

// Position of `list` in the lexicographic order of enumerate_lists.
std::size_t list_rank(const ArmList& list, std::size_t num_arms);

double expected_list_reward(const ProblemInstance& instance, const ArmList& list);

// Membership tolerance for optimal lists.
inline constexpr double kTieTolerance = 1e-12;

struct OptimalStructure {
  double optimal_value = 0.0;
  std::vector<ArmList> optimal_lists;
  std::vector<Arm> relevant_arms;
  std::vector<Arm> irrelevant_arms;
  // slot_winners[k]: arms shown at slot k by some optimal list, ascending.
  std::vector<std::vector<Arm>> slot_winners;

  bool is_relevant(Arm a) const;
};

OptimalStructure optimal_structure(const ProblemInstance& instance);

struct Observation {
  std::vector<std::uint8_t> exam;
  std::vector<double> values;
  double reward = 0.0;
};

// Draws slot feedback in slot order. FACTORIZED consumes two uniforms per
// slot (examination, satisfaction); PER_SLOT consumes one.
Observation sample_observation(const ProblemInstance& instance, const ArmList& list, Rng& rng);
// Allocation-free variant for the simulation loop. Does not validate `list`.
void sample_observation_into(const ProblemInstance& instance, const ArmList& list, Rng& rng,
                             Observation& out);

}  // namespace slotbandit
