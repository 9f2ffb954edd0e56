#include "slotbandit/divergence.hpp"

#include <cmath>
#include <limits>

#include "slotbandit/errors.hpp"

namespace slotbandit {

double bernoulli_kl(double p, double q) {
  if (!(p > 0.0 && p < 1.0) || !(q > 0.0 && q < 1.0)) {
    throw DomainError("bernoulli_kl: arguments must lie in (0, 1)");
  }
  if (p == q) return 0.0;
  const double kl = p * std::log(p / q) + (1.0 - p) * std::log((1.0 - p) / (1.0 - q));
  // Rounding can leave a tiny negative value when p and q are adjacent doubles.
  return kl > 0.0 ? kl : 0.0;
}

double slot_divergence(const ProblemInstance& instance, Slot k, Arm a, Arm b) {
  if (k >= instance.num_slots() || a >= instance.num_arms() || b >= instance.num_arms()) {
    throw InvalidListError("slot_divergence: slot or arm out of range");
  }
  if (a == b) return 0.0;
  if (instance.kind() == InstanceKind::kFactorized) {
    const auto& mu = instance.arm_means();
    return instance.exam_probs()[k] * bernoulli_kl(mu[a], mu[b]);
  }
  return bernoulli_kl(instance.slot_mean(k, a), instance.slot_mean(k, b));
}

double list_divergence(const ProblemInstance& instance, const ArmList& list, Slot k, Arm a) {
  instance.check_list(list);
  if (k >= list.size()) throw InvalidListError("list_divergence: slot out of range");
  return slot_divergence(instance, k, list[k], a);
}

RegretTable regret_table(const ProblemInstance& instance) {
  RegretTable t;
  t.lists = enumerate_lists(instance);
  t.per_list.reserve(t.lists.size());
  std::vector<double> values;
  values.reserve(t.lists.size());
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& l : t.lists) {
    values.push_back(expected_list_reward(instance, l));
    best = std::max(best, values.back());
  }
  t.optimal_value = best;
  for (double v : values) {
    double r = best - v;
    if (r <= kTieTolerance) r = 0.0;
    t.per_list.push_back(r);
  }

  const std::size_t m = instance.num_slots();
  const std::size_t n = instance.num_arms();
  t.per_slot_arm = Matrix(m, n, std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < t.lists.size(); ++i) {
    for (Slot k = 0; k < m; ++k) {
      double& cell = t.per_slot_arm(k, t.lists[i][k]);
      cell = std::min(cell, t.per_list[i]);
    }
  }
  return t;
}

}  // namespace slotbandit
