#pragma once

// Asymptotic regret lower bounds for uniformly good strategies:
//
//  * the constraint system over list play rates y(pi) written as a linear
//    program, solved with the dense simplex and reported with its duals
//    (the KKT multipliers lambda_{i,j});
//  * the closed-form per-irrelevant-arm bound (max over relevant arms of the
//    min over slots of Reg(k, j) / I_k(j, i));
//  * the per-slot bound for instances whose slot rewards are independent
//    across positions, and the matching per-slot play-count bounds;
//  * the factorized-model constant reached by the optimal policy, both as
//    literally stated and in the form implied by the closed-form bound.

#include <optional>
#include <utility>
#include <vector>

#include "slotbandit/divergence.hpp"
#include "slotbandit/matrix.hpp"
#include "slotbandit/model.hpp"
#include "slotbandit/simplex.hpp"

namespace slotbandit {

struct BoundLP {
  std::vector<ArmList> lists;                 // one column y_pi per list
  std::vector<std::pair<Arm, Arm>> row_pairs;  // (relevant i, irrelevant j)
  Matrix coefficients;                        // rows x lists
  std::vector<double> costs;                  // Reg(pi)

  bool empty() const noexcept { return row_pairs.empty(); }
};

// Empty program (bound 0) when the instance has no irrelevant arm.
BoundLP build_lp(const ProblemInstance& instance);
BoundLP build_lp(const ProblemInstance& instance, const OptimalStructure& structure,
                 const RegretTable& regrets);

struct LPSolution {
  LpStatus status = LpStatus::kOptimal;
  std::vector<double> y;
  double objective = 0.0;
  std::vector<double> duals;           // lambda per row, >= 0
  std::vector<double> reduced_costs;   // Reg(pi) - sum_r lambda_r c_{r,pi}

  // Residuals, recomputed from the program data.
  double primal_infeasibility = 0.0;   // max(1 - row activity, -y)
  double dual_infeasibility = 0.0;     // max(-lambda, -reduced cost)
  double row_slackness = 0.0;          // max |slack_r * lambda_r|
  double column_slackness = 0.0;       // max |y_pi * reduced cost_pi|
};

LPSolution solve_lp(const BoundLP& lp);

// Minimum of the program over all basic solutions, by enumerating square
// active sets. Independent of the simplex path; exponential, so only for
// programs with at most `max_columns` columns. Returns nullopt when the
// program is too large.
std::optional<double> enumerate_active_sets(const BoundLP& lp, std::size_t max_columns = 12);

double theorem1_bound(const ProblemInstance& instance);
double theorem1_bound(const ProblemInstance& instance, const OptimalStructure& structure,
                      const RegretTable& regrets);

// PER_SLOT only.
double theorem2_bound(const ProblemInstance& instance);
double theorem2_bound(const ProblemInstance& instance, const OptimalStructure& structure,
                      const RegretTable& regrets);

// Lower bound on liminf N_T(k, j) / log T for irrelevant arm j: the largest
// 1 / I_k(j, i) over arms i that win slot k. PER_SLOT only.
double play_count_bound(const ProblemInstance& instance, Slot k, Arm j);
double play_count_bound(const ProblemInstance& instance, const OptimalStructure& structure, Slot k,
                        Arm j);

struct Theorem3Constant {
  // sum_j (mu_(m) - mu_j) / (p_m kl(mu_j, mu_(m))), mu_(m) the m-th largest mean.
  double as_stated = 0.0;
  // The closed-form bound on the same instance, with no 1/p_m factor.
  double theorem1_consistent = 0.0;
};

// FACTORIZED only.
Theorem3Constant theorem3_constant(const ProblemInstance& instance);

struct LowerBoundResult {
  double lp_bound = 0.0;
  LPSolution lp;
  double theorem1 = 0.0;
  std::optional<double> theorem2;
  std::optional<Theorem3Constant> theorem3;
  // m x N; zero for relevant arms. Filled for PER_SLOT instances only.
  Matrix per_slot_play_bounds;
};

// Throws RunError if the simplex reports a status other than optimal.
LowerBoundResult compute_lower_bounds(const ProblemInstance& instance);

}  // namespace slotbandit
