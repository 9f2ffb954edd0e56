#pragma once

#include "slotbandit/model.hpp"

namespace slotbandit::testing {

inline ProblemInstance pbm_3x2() { return ProblemInstance::factorized({1.0, 0.5}, {0.9, 0.8, 0.6}); }

inline ProblemInstance pos_2x2() {
  Matrix theta(3, 2);
  theta(0, 0) = 0.9;
  theta(0, 1) = 0.5;
  theta(1, 0) = 0.7;
  theta(1, 1) = 0.6;
  theta(2, 0) = 0.5;
  theta(2, 1) = 0.3;
  return ProblemInstance::per_slot(theta);
}

// Random factorized instance with distinct means and strictly decreasing
// examination probabilities.
inline ProblemInstance random_factorized(Rng& rng, std::size_t n, std::size_t m) {
  std::vector<double> p(m);
  double level = 1.0;
  for (std::size_t k = 0; k < m; ++k) {
    p[k] = level;
    level *= 0.3 + 0.6 * rng.uniform();
  }
  std::vector<double> mu(n);
  for (auto& v : mu) v = 0.05 + 0.9 * rng.uniform();
  return ProblemInstance::factorized(p, mu);
}

}  // namespace slotbandit::testing
