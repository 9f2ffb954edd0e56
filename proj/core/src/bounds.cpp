#include "slotbandit/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "slotbandit/errors.hpp"

namespace slotbandit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string pair_name(Arm i, Arm j) {
  return "(relevant " + std::to_string(i + 1) + ", irrelevant " + std::to_string(j + 1) + ")";
}

void require_per_slot(const ProblemInstance& instance, const char* what) {
  if (instance.kind() != InstanceKind::kPerSlot) {
    throw ValidationError("kind", std::string(what) + " needs a per_slot instance");
  }
}

// Gaussian elimination with partial pivoting; false if singular.
bool solve_square(std::vector<double> a, std::vector<double> b, std::size_t n, std::vector<double>& x) {
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r * n + col]) > std::abs(a[piv * n + col])) piv = r;
    }
    if (std::abs(a[piv * n + col]) < 1e-12) return false;
    if (piv != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a[piv * n + c], a[col * n + c]);
      std::swap(b[piv], b[col]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r * n + col] / a[col * n + col];
      if (f == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
      b[r] -= f * b[col];
    }
  }
  x.assign(n, 0.0);
  for (std::size_t r = n; r-- > 0;) {
    double s = b[r];
    for (std::size_t c = r + 1; c < n; ++c) s -= a[r * n + c] * x[c];
    x[r] = s / a[r * n + r];
  }
  return true;
}

// Calls f(indices) for every k-subset of {0..n-1}, ascending.
template <typename F>
void for_each_subset(std::size_t n, std::size_t k, F&& f) {
  if (k > n) return;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    f(idx);
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace

BoundLP build_lp(const ProblemInstance& instance, const OptimalStructure& structure,
                 const RegretTable& regrets) {
  BoundLP lp;
  lp.lists = regrets.lists;
  lp.costs = regrets.per_list;
  for (Arm i : structure.relevant_arms) {
    for (Arm j : structure.irrelevant_arms) lp.row_pairs.emplace_back(i, j);
  }
  lp.coefficients = Matrix(lp.row_pairs.size(), lp.lists.size());
  for (std::size_t r = 0; r < lp.row_pairs.size(); ++r) {
    const auto [i, j] = lp.row_pairs[r];
    bool any_positive = false;
    for (std::size_t c = 0; c < lp.lists.size(); ++c) {
      const auto k = lp.lists[c].slot_of(j);
      if (!k) continue;
      const double coef = list_divergence(instance, lp.lists[c], *k, i);
      lp.coefficients(r, c) = coef;
      any_positive = any_positive || coef > 0.0;
    }
    if (!any_positive) {
      throw IllPosedError("arm pair " + pair_name(i, j) + " has zero divergence in every slot");
    }
  }
  return lp;
}

BoundLP build_lp(const ProblemInstance& instance) {
  return build_lp(instance, optimal_structure(instance), regret_table(instance));
}

LPSolution solve_lp(const BoundLP& lp) {
  LPSolution sol;
  if (lp.empty()) {
    sol.y.assign(lp.lists.size(), 0.0);
    sol.reduced_costs = lp.costs;
    return sol;
  }
  LinearProgram prog;
  prog.a = lp.coefficients;
  prog.b.assign(lp.row_pairs.size(), 1.0);
  prog.sense.assign(lp.row_pairs.size(), RowSense::kGreaterEqual);
  prog.c = lp.costs;
  const SimplexResult res = solve_simplex(prog);
  sol.status = res.status;
  if (res.status != LpStatus::kOptimal) return sol;
  sol.y = res.x;
  sol.objective = res.objective;
  sol.duals = res.duals;

  const std::size_t rows = lp.row_pairs.size();
  const std::size_t cols = lp.lists.size();
  sol.reduced_costs = lp.costs;
  for (std::size_t r = 0; r < rows; ++r) {
    double activity = 0.0;
    for (std::size_t c = 0; c < cols; ++c) {
      activity += lp.coefficients(r, c) * sol.y[c];
      sol.reduced_costs[c] -= sol.duals[r] * lp.coefficients(r, c);
    }
    const double slack = activity - 1.0;
    sol.primal_infeasibility = std::max(sol.primal_infeasibility, -slack);
    sol.dual_infeasibility = std::max(sol.dual_infeasibility, -sol.duals[r]);
    sol.row_slackness = std::max(sol.row_slackness, std::abs(slack * sol.duals[r]));
  }
  for (std::size_t c = 0; c < cols; ++c) {
    sol.primal_infeasibility = std::max(sol.primal_infeasibility, -sol.y[c]);
    sol.dual_infeasibility = std::max(sol.dual_infeasibility, -sol.reduced_costs[c]);
    sol.column_slackness = std::max(sol.column_slackness, std::abs(sol.y[c] * sol.reduced_costs[c]));
  }
  return sol;
}

std::optional<double> enumerate_active_sets(const BoundLP& lp, std::size_t max_columns) {
  if (lp.empty()) return 0.0;
  const std::size_t rows = lp.row_pairs.size();
  const std::size_t cols = lp.lists.size();
  if (cols > max_columns) return std::nullopt;

  double best = kInf;
  std::vector<double> y_s;
  for (std::size_t size = 1; size <= std::min(rows, cols); ++size) {
    for_each_subset(rows, size, [&](const std::vector<std::size_t>& active_rows) {
      for_each_subset(cols, size, [&](const std::vector<std::size_t>& basic_cols) {
        std::vector<double> a(size * size);
        for (std::size_t r = 0; r < size; ++r) {
          for (std::size_t c = 0; c < size; ++c) {
            a[r * size + c] = lp.coefficients(active_rows[r], basic_cols[c]);
          }
        }
        if (!solve_square(std::move(a), std::vector<double>(size, 1.0), size, y_s)) return;
        for (double v : y_s) {
          if (v < -1e-12) return;
        }
        for (std::size_t r = 0; r < rows; ++r) {
          double activity = 0.0;
          for (std::size_t c = 0; c < size; ++c) activity += lp.coefficients(r, basic_cols[c]) * y_s[c];
          if (activity < 1.0 - 1e-9) return;
        }
        double obj = 0.0;
        for (std::size_t c = 0; c < size; ++c) obj += lp.costs[basic_cols[c]] * y_s[c];
        best = std::min(best, obj);
      });
    });
  }
  return best;
}

double theorem1_bound(const ProblemInstance& instance, const OptimalStructure& structure,
                      const RegretTable& regrets) {
  double total = 0.0;
  for (Arm j : structure.irrelevant_arms) {
    double worst = 0.0;
    for (Arm i : structure.relevant_arms) {
      double best_slot = kInf;
      for (Slot k = 0; k < instance.num_slots(); ++k) {
        const double div = slot_divergence(instance, k, j, i);
        if (div > 0.0) best_slot = std::min(best_slot, regrets.per_slot_arm(k, j) / div);
      }
      if (best_slot == kInf) {
        throw IllPosedError("arm pair " + pair_name(i, j) + " has zero divergence in every slot");
      }
      worst = std::max(worst, best_slot);
    }
    total += worst;
  }
  return total;
}

double theorem1_bound(const ProblemInstance& instance) {
  return theorem1_bound(instance, optimal_structure(instance), regret_table(instance));
}

double play_count_bound(const ProblemInstance& instance, const OptimalStructure& structure, Slot k,
                        Arm j) {
  require_per_slot(instance, "play_count_bound");
  if (k >= instance.num_slots()) throw ValidationError("slot", "out of range");
  if (j >= instance.num_arms()) throw ValidationError("arm", "out of range");
  if (structure.is_relevant(j)) throw ValidationError("arm", "arm " + std::to_string(j + 1) + " is relevant");
  double best = 0.0;
  for (Arm i : structure.slot_winners[k]) {
    const double div = slot_divergence(instance, k, j, i);
    if (div <= 0.0) {
      throw IllPosedError("arm pair " + pair_name(i, j) + " has zero divergence in slot " +
                          std::to_string(k + 1));
    }
    best = std::max(best, 1.0 / div);
  }
  return best;
}

double play_count_bound(const ProblemInstance& instance, Slot k, Arm j) {
  return play_count_bound(instance, optimal_structure(instance), k, j);
}

double theorem2_bound(const ProblemInstance& instance, const OptimalStructure& structure,
                      const RegretTable& regrets) {
  require_per_slot(instance, "theorem2_bound");
  double total = 0.0;
  for (Arm j : structure.irrelevant_arms) {
    for (Slot k = 0; k < instance.num_slots(); ++k) {
      double worst = 0.0;
      for (Arm i : structure.slot_winners[k]) {
        const double div = slot_divergence(instance, k, j, i);
        if (div <= 0.0) {
          throw IllPosedError("arm pair " + pair_name(i, j) + " has zero divergence in slot " +
                              std::to_string(k + 1));
        }
        worst = std::max(worst, regrets.per_slot_arm(k, j) / div);
      }
      total += worst;
    }
  }
  return total;
}

double theorem2_bound(const ProblemInstance& instance) {
  return theorem2_bound(instance, optimal_structure(instance), regret_table(instance));
}

Theorem3Constant theorem3_constant(const ProblemInstance& instance) {
  if (instance.kind() != InstanceKind::kFactorized) {
    throw ValidationError("kind", "theorem3_constant needs a factorized instance");
  }
  const auto structure = optimal_structure(instance);
  const auto regrets = regret_table(instance);
  const auto& mu = instance.arm_means();
  std::vector<double> sorted = mu;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  const double mu_m = sorted[instance.num_slots() - 1];
  const double p_m = instance.exam_probs().back();

  Theorem3Constant out;
  for (Arm j : structure.irrelevant_arms) {
    const double kl = bernoulli_kl(mu[j], mu_m);
    if (kl <= 0.0) {
      throw IllPosedError("irrelevant arm " + std::to_string(j + 1) + " has the m-th largest mean");
    }
    out.as_stated += (mu_m - mu[j]) / (p_m * kl);
  }
  out.theorem1_consistent = theorem1_bound(instance, structure, regrets);
  return out;
}

LowerBoundResult compute_lower_bounds(const ProblemInstance& instance) {
  const auto structure = optimal_structure(instance);
  const auto regrets = regret_table(instance);

  LowerBoundResult out;
  const BoundLP lp = build_lp(instance, structure, regrets);
  out.lp = solve_lp(lp);
  if (out.lp.status != LpStatus::kOptimal) {
    throw RunError("lower-bound program not solved to optimality (internal error)");
  }
  out.lp_bound = out.lp.objective;
  out.theorem1 = theorem1_bound(instance, structure, regrets);
  if (instance.kind() == InstanceKind::kPerSlot) {
    out.theorem2 = theorem2_bound(instance, structure, regrets);
    out.per_slot_play_bounds = Matrix(instance.num_slots(), instance.num_arms());
    for (Arm j : structure.irrelevant_arms) {
      for (Slot k = 0; k < instance.num_slots(); ++k) {
        out.per_slot_play_bounds(k, j) = play_count_bound(instance, structure, k, j);
      }
    }
  } else {
    out.theorem3 = theorem3_constant(instance);
  }
  return out;
}

}  // namespace slotbandit
