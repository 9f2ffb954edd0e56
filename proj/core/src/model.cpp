#include "slotbandit/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "slotbandit/errors.hpp"

namespace slotbandit {

namespace {

constexpr std::uint64_t kMaxLists = 50'000'000;

bool finite_in(double x, double lo, double hi, bool closed) {
  if (!std::isfinite(x)) return false;
  return closed ? (x >= lo && x <= hi) : (x > lo && x < hi);
}

void check_shape(std::size_t num_arms, std::size_t num_slots) {
  if (num_arms < 2) throw ValidationError("arm_means", "need at least 2 arms");
  if (num_slots < 1) throw ValidationError("exam_probs", "need at least 1 slot");
  if (num_slots > num_arms) throw ValidationError("exam_probs", "more slots than arms");
  if (count_lists(num_arms, num_slots) > kMaxLists) {
    throw ValidationError("arm_means", "too many arm lists to enumerate");
  }
}

}  // namespace

std::string_view to_string(InstanceKind kind) noexcept {
  return kind == InstanceKind::kFactorized ? "factorized" : "per_slot";
}

bool ArmList::contains(Arm a) const noexcept {
  return std::find(arms_.begin(), arms_.end(), a) != arms_.end();
}

std::optional<Slot> ArmList::slot_of(Arm a) const noexcept {
  auto it = std::find(arms_.begin(), arms_.end(), a);
  if (it == arms_.end()) return std::nullopt;
  return static_cast<Slot>(it - arms_.begin());
}

bool ArmList::has_distinct_arms() const {
  for (std::size_t i = 0; i < arms_.size(); ++i) {
    for (std::size_t j = i + 1; j < arms_.size(); ++j) {
      if (arms_[i] == arms_[j]) return false;
    }
  }
  return true;
}

ProblemInstance ProblemInstance::factorized(std::vector<double> exam_probs,
                                            std::vector<double> arm_means,
                                            ValidationOptions options) {
  check_shape(arm_means.size(), exam_probs.size());
  for (std::size_t k = 0; k < exam_probs.size(); ++k) {
    const double p = exam_probs[k];
    if (!finite_in(p, 0.0, 1.0, true) || p == 0.0) {
      throw ValidationError("exam_probs[" + std::to_string(k) + "]", "must lie in (0, 1]");
    }
    if (k > 0) {
      const double prev = exam_probs[k - 1];
      if (p > prev || (p == prev && !options.allow_tied_exam_probs)) {
        throw ValidationError("exam_probs[" + std::to_string(k) + "]", "must be strictly decreasing");
      }
    }
  }
  for (std::size_t j = 0; j < arm_means.size(); ++j) {
    if (!finite_in(arm_means[j], 0.0, 1.0, options.allow_boundary_means)) {
      throw ValidationError("arm_means[" + std::to_string(j) + "]",
                            options.allow_boundary_means ? "must lie in [0, 1]" : "must lie in (0, 1)");
    }
  }

  ProblemInstance inst;
  inst.kind_ = InstanceKind::kFactorized;
  inst.num_arms_ = arm_means.size();
  inst.num_slots_ = exam_probs.size();
  inst.slot_means_ = Matrix(inst.num_arms_, inst.num_slots_);
  for (Arm j = 0; j < inst.num_arms_; ++j) {
    for (Slot k = 0; k < inst.num_slots_; ++k) inst.slot_means_(j, k) = exam_probs[k] * arm_means[j];
  }
  inst.exam_probs_ = std::move(exam_probs);
  inst.arm_means_ = std::move(arm_means);
  return inst;
}

ProblemInstance ProblemInstance::per_slot(Matrix slot_means, ValidationOptions options) {
  check_shape(slot_means.rows(), slot_means.cols());
  for (Arm j = 0; j < slot_means.rows(); ++j) {
    for (Slot k = 0; k < slot_means.cols(); ++k) {
      if (!finite_in(slot_means(j, k), 0.0, 1.0, options.allow_boundary_means)) {
        throw ValidationError("slot_means[" + std::to_string(j) + "][" + std::to_string(k) + "]",
                              options.allow_boundary_means ? "must lie in [0, 1]" : "must lie in (0, 1)");
      }
    }
  }
  ProblemInstance inst;
  inst.kind_ = InstanceKind::kPerSlot;
  inst.num_arms_ = slot_means.rows();
  inst.num_slots_ = slot_means.cols();
  inst.slot_means_ = std::move(slot_means);
  return inst;
}

bool ProblemInstance::valid_list(const ArmList& list) const {
  if (list.size() != num_slots_) return false;
  for (Arm a : list) {
    if (a >= num_arms_) return false;
  }
  return list.has_distinct_arms();
}

void ProblemInstance::check_list(const ArmList& list) const {
  if (list.size() != num_slots_) {
    throw InvalidListError("list has " + std::to_string(list.size()) + " arms, instance has " +
                           std::to_string(num_slots_) + " slots");
  }
  for (Arm a : list) {
    if (a >= num_arms_) throw InvalidListError("arm id " + std::to_string(a) + " out of range");
  }
  if (!list.has_distinct_arms()) throw InvalidListError("list repeats an arm");
}

std::uint64_t count_lists(std::size_t num_arms, std::size_t num_slots) {
  if (num_slots > num_arms) return 0;
  std::uint64_t n = 1;
  for (std::size_t i = 0; i < num_slots; ++i) {
    const std::uint64_t f = num_arms - i;
    if (n > std::numeric_limits<std::uint64_t>::max() / f) return std::numeric_limits<std::uint64_t>::max();
    n *= f;
  }
  return n;
}

std::vector<ArmList> enumerate_lists(std::size_t num_arms, std::size_t num_slots) {
  std::vector<ArmList> out;
  if (num_slots > num_arms) return out;
  out.reserve(count_lists(num_arms, num_slots));

  std::vector<Arm> current(num_slots);
  std::vector<bool> used(num_arms, false);
  // Iterative depth-first search; candidate arms tried in increasing order.
  std::vector<Arm> next(num_slots + 1, 0);
  std::size_t depth = 0;
  while (true) {
    if (depth == num_slots) {
      out.emplace_back(current);
      if (depth == 0) break;
      --depth;
      used[current[depth]] = false;
      next[depth] = current[depth] + 1;
      continue;
    }
    Arm a = next[depth];
    while (a < num_arms && used[a]) ++a;
    if (a == num_arms) {
      if (depth == 0) break;
      --depth;
      used[current[depth]] = false;
      next[depth] = current[depth] + 1;
      continue;
    }
    current[depth] = a;
    used[a] = true;
    ++depth;
    next[depth] = 0;
  }
  return out;
}

std::vector<ArmList> enumerate_lists(const ProblemInstance& instance) {
  return enumerate_lists(instance.num_arms(), instance.num_slots());
}

std::size_t list_rank(const ArmList& list, std::size_t num_arms) {
  const std::size_t m = list.size();
  std::size_t rank = 0;
  for (std::size_t k = 0; k < m; ++k) {
    std::size_t smaller_unused = list[k];
    for (std::size_t i = 0; i < k; ++i) {
      if (list[i] < list[k]) --smaller_unused;
    }
    // Lists sharing the first k+1 entries: (N-k-1)(N-k-2)...(N-m+1).
    std::size_t block = 1;
    for (std::size_t i = k + 1; i < m; ++i) block *= num_arms - i;
    rank += smaller_unused * block;
  }
  return rank;
}

double expected_list_reward(const ProblemInstance& instance, const ArmList& list) {
  instance.check_list(list);
  double sum = 0.0;
  for (Slot k = 0; k < list.size(); ++k) sum += instance.slot_mean(k, list[k]);
  return sum;
}

bool OptimalStructure::is_relevant(Arm a) const {
  return std::binary_search(relevant_arms.begin(), relevant_arms.end(), a);
}

OptimalStructure optimal_structure(const ProblemInstance& instance) {
  const auto lists = enumerate_lists(instance);
  std::vector<double> values;
  values.reserve(lists.size());
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& l : lists) {
    values.push_back(expected_list_reward(instance, l));
    best = std::max(best, values.back());
  }

  OptimalStructure s;
  s.optimal_value = best;
  s.slot_winners.resize(instance.num_slots());
  std::vector<bool> relevant(instance.num_arms(), false);
  for (std::size_t i = 0; i < lists.size(); ++i) {
    if (best - values[i] > kTieTolerance) continue;
    s.optimal_lists.push_back(lists[i]);
    for (Slot k = 0; k < instance.num_slots(); ++k) {
      relevant[lists[i][k]] = true;
      auto& w = s.slot_winners[k];
      if (std::find(w.begin(), w.end(), lists[i][k]) == w.end()) w.push_back(lists[i][k]);
    }
  }
  for (auto& w : s.slot_winners) std::sort(w.begin(), w.end());
  for (Arm a = 0; a < instance.num_arms(); ++a) {
    (relevant[a] ? s.relevant_arms : s.irrelevant_arms).push_back(a);
  }
  return s;
}

void sample_observation_into(const ProblemInstance& instance, const ArmList& list, Rng& rng,
                             Observation& out) {
  const std::size_t m = instance.num_slots();
  out.exam.resize(m);
  out.values.resize(m);
  double reward = 0.0;
  if (instance.kind() == InstanceKind::kFactorized) {
    const auto& p = instance.exam_probs();
    const auto& mu = instance.arm_means();
    for (Slot k = 0; k < m; ++k) {
      const bool examined = rng.bernoulli(p[k]);
      const bool satisfied = rng.bernoulli(mu[list[k]]);
      out.exam[k] = examined ? 1 : 0;
      out.values[k] = (examined && satisfied) ? 1.0 : 0.0;
      reward += out.values[k];
    }
  } else {
    for (Slot k = 0; k < m; ++k) {
      out.exam[k] = 1;
      out.values[k] = rng.bernoulli(instance.slot_mean(k, list[k])) ? 1.0 : 0.0;
      reward += out.values[k];
    }
  }
  out.reward = reward;
}

Observation sample_observation(const ProblemInstance& instance, const ArmList& list, Rng& rng) {
  instance.check_list(list);
  Observation obs;
  sample_observation_into(instance, list, rng, obs);
  return obs;
}

}  // namespace slotbandit
