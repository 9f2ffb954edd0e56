#pragma once

// Bernoulli KL divergences and the regret quantities built from them.

#include <vector>

#include "slotbandit/matrix.hpp"
#include "slotbandit/model.hpp"

namespace slotbandit {

// KL(Bernoulli(p) || Bernoulli(q)), natural log. Both arguments must lie in
// (0, 1); exactly 0 when p == q.
double bernoulli_kl(double p, double q);

// I_k(a, b): divergence between the slot-k reward laws of arms a and b.
// FACTORIZED: p_k * kl(mu_a, mu_b). PER_SLOT: kl(theta_{a,k}, theta_{b,k}).
double slot_divergence(const ProblemInstance& instance, Slot k, Arm a, Arm b);

// Divergence between the feedback laws of `list` and of `list` with arm `a`
// substituted at slot k. Product densities collapse it to one slot term.
double list_divergence(const ProblemInstance& instance, const ArmList& list, Slot k, Arm a);

struct RegretTable {
  std::vector<ArmList> lists;     // lexicographic order
  std::vector<double> per_list;   // Reg(pi), aligned with `lists`
  Matrix per_slot_arm;            // m x N, Reg(k, j)
  double optimal_value = 0.0;

  double list_regret(const ArmList& list, std::size_t num_arms) const {
    return per_list[list_rank(list, num_arms)];
  }
};

RegretTable regret_table(const ProblemInstance& instance);

}  // namespace slotbandit
