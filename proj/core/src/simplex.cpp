#include "slotbandit/simplex.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace slotbandit {

namespace {

constexpr double kPivotEps = 1e-12;
constexpr double kCostEps = 1e-11;
constexpr double kFeasEps = 1e-9;
constexpr std::size_t kMaxIterations = 1'000'000;

// Tableau rows 0..m-1 hold constraints [A | rhs]; row m holds reduced costs
// with -objective in the rhs column.
class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols) : t_(rows + 1, cols + 1), basis_(rows), m_(rows), n_(cols) {}

  double& at(std::size_t r, std::size_t c) { return t_(r, c); }
  double at(std::size_t r, std::size_t c) const { return t_(r, c); }
  double& rhs(std::size_t r) { return t_(r, n_); }
  double rhs(std::size_t r) const { return t_(r, n_); }
  std::vector<std::size_t>& basis() { return basis_; }
  const std::vector<std::size_t>& basis() const { return basis_; }

  void pivot(std::size_t pr, std::size_t pc) {
    const double inv = 1.0 / t_(pr, pc);
    double* prow = t_.row(pr);
    for (std::size_t c = 0; c <= n_; ++c) prow[c] *= inv;
    prow[pc] = 1.0;
    for (std::size_t r = 0; r <= m_; ++r) {
      if (r == pr) continue;
      double* row = t_.row(r);
      const double f = row[pc];
      if (f == 0.0) continue;
      for (std::size_t c = 0; c <= n_; ++c) row[c] -= f * prow[c];
      row[pc] = 0.0;
    }
    basis_[pr] = pc;
  }

  // Loads the cost row for `cost` and prices out the current basis.
  void set_costs(const std::vector<double>& cost) {
    double* z = t_.row(m_);
    for (std::size_t c = 0; c < n_; ++c) z[c] = cost[c];
    z[n_] = 0.0;
    for (std::size_t r = 0; r < m_; ++r) {
      const double cb = cost[basis_[r]];
      if (cb == 0.0) continue;
      const double* row = t_.row(r);
      for (std::size_t c = 0; c <= n_; ++c) z[c] -= cb * row[c];
    }
  }

  // Bland's rule iterations. `allowed[c]` gates entering columns.
  // Returns false if unbounded.
  bool optimize(const std::vector<bool>& allowed, std::size_t& iterations) {
    while (true) {
      if (++iterations > kMaxIterations) throw std::runtime_error("simplex: iteration limit");
      std::size_t enter = n_;
      for (std::size_t c = 0; c < n_; ++c) {
        if (allowed[c] && t_(m_, c) < -kCostEps) {
          enter = c;
          break;
        }
      }
      if (enter == n_) return true;
      std::size_t leave = m_;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < m_; ++r) {
        const double a = t_(r, enter);
        if (a <= kPivotEps) continue;
        const double ratio = t_(r, n_) / a;
        if (ratio < best_ratio - 1e-14 ||
            (std::abs(ratio - best_ratio) <= 1e-14 && leave < m_ && basis_[r] < basis_[leave])) {
          best_ratio = ratio;
          leave = r;
        }
      }
      if (leave == m_) return false;
      pivot(leave, enter);
    }
  }

  std::size_t rows() const { return m_; }
  std::size_t cols() const { return n_; }

 private:
  Matrix t_;
  std::vector<std::size_t> basis_;
  std::size_t m_;
  std::size_t n_;
};

}  // namespace

SimplexResult solve_simplex(const LinearProgram& lp) {
  const std::size_t m = lp.a.rows();
  const std::size_t n = lp.a.cols();
  if (lp.b.size() != m || lp.sense.size() != m || lp.c.size() != n) {
    throw std::invalid_argument("solve_simplex: inconsistent dimensions");
  }

  // Columns: originals [0, n), one slack/surplus per inequality row, then one
  // artificial per row. Each row's artificial (or slack, for <= rows with
  // b >= 0) forms the initial identity basis.
  std::vector<double> sign(m, 1.0);
  std::vector<std::size_t> slack_col(m, SIZE_MAX);
  std::size_t num_slack = 0;
  for (std::size_t i = 0; i < m; ++i) {
    if (lp.sense[i] != RowSense::kEqual) slack_col[i] = n + num_slack++;
  }
  const std::size_t art0 = n + num_slack;
  const std::size_t total = art0 + m;

  Tableau tab(m, total);
  std::vector<std::size_t> identity_col(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (lp.b[i] < 0) sign[i] = -1.0;
    for (std::size_t j = 0; j < n; ++j) tab.at(i, j) = sign[i] * lp.a(i, j);
    if (slack_col[i] != SIZE_MAX) {
      // >= gets a surplus (-1), <= gets a slack (+1), before sign flip.
      const double s = lp.sense[i] == RowSense::kGreaterEqual ? -1.0 : 1.0;
      tab.at(i, slack_col[i]) = sign[i] * s;
    }
    tab.at(i, art0 + i) = 1.0;
    tab.rhs(i) = sign[i] * lp.b[i];
    tab.basis()[i] = art0 + i;
    identity_col[i] = art0 + i;
  }

  SimplexResult res;
  std::vector<bool> allowed(total, true);

  // Phase 1: minimize the sum of artificials.
  std::vector<double> phase1(total, 0.0);
  for (std::size_t i = 0; i < m; ++i) phase1[art0 + i] = 1.0;
  tab.set_costs(phase1);
  tab.optimize(allowed, res.iterations);
  if (-tab.rhs(m) > kFeasEps) {
    res.status = LpStatus::kInfeasible;
    return res;
  }

  // Drive zero-level artificials out of the basis where possible.
  for (std::size_t r = 0; r < m; ++r) {
    if (tab.basis()[r] < art0) continue;
    for (std::size_t c = 0; c < art0; ++c) {
      if (std::abs(tab.at(r, c)) > 1e-9) {
        tab.pivot(r, c);
        break;
      }
    }
  }

  // Phase 2.
  for (std::size_t c = art0; c < total; ++c) allowed[c] = false;
  std::vector<double> cost(total, 0.0);
  for (std::size_t j = 0; j < n; ++j) cost[j] = lp.c[j];
  tab.set_costs(cost);
  if (!tab.optimize(allowed, res.iterations)) {
    res.status = LpStatus::kUnbounded;
    return res;
  }

  res.status = LpStatus::kOptimal;
  res.x.assign(n, 0.0);
  for (std::size_t r = 0; r < m; ++r) {
    if (tab.basis()[r] < n) res.x[tab.basis()[r]] = tab.rhs(r);
  }
  res.objective = 0.0;
  for (std::size_t j = 0; j < n; ++j) res.objective += lp.c[j] * res.x[j];
  res.reduced_costs.resize(n);
  for (std::size_t j = 0; j < n; ++j) res.reduced_costs[j] = tab.at(m, j);
  // The identity column of row i has zero cost, so its reduced cost is -y_i
  // for the sign-adjusted row.
  res.duals.resize(m);
  for (std::size_t i = 0; i < m; ++i) res.duals[i] = -sign[i] * tab.at(m, identity_col[i]);
  return res;
}

}  // namespace slotbandit
