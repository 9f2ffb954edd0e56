#pragma once

// Dense two-phase primal simplex with Bland's rule. Intended for the small
// lower-bound programs in this library (a few hundred columns at most).

#include <cstddef>
#include <vector>

#include "slotbandit/matrix.hpp"

namespace slotbandit {

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };
enum class RowSense { kGreaterEqual, kLessEqual, kEqual };

// minimize c'x  subject to  row_i(A) x (sense_i) b_i,  x >= 0.
struct LinearProgram {
  Matrix a;
  std::vector<double> b;
  std::vector<RowSense> sense;
  std::vector<double> c;
};

struct SimplexResult {
  LpStatus status = LpStatus::kInfeasible;
  std::vector<double> x;
  double objective = 0.0;
  // Row multipliers: c = A' duals + reduced_costs. Non-negative on >= rows,
  // non-positive on <= rows at optimality.
  std::vector<double> duals;
  std::vector<double> reduced_costs;
  std::size_t iterations = 0;
};

SimplexResult solve_simplex(const LinearProgram& lp);

}  // namespace slotbandit
