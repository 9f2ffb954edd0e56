#pragma once

// Exhaustive maximum-weight assignment of distinct objects to slots. Sizes
// here are tiny (at most a few thousand candidate assignments).

#include <cstddef>
#include <span>
#include <vector>

#include "slotbandit/matrix.hpp"

namespace slotbandit {

struct Assignment {
  double value = 0.0;
  // objects[i] is the object placed in slots[i] of the request.
  std::vector<std::size_t> objects;
};

// Maximizes sum_i weights(slots[i], objects[i]) over injective maps from
// `slots` into `candidates`. Ties resolve to the lexicographically smallest
// object sequence, so with ascending candidates the smallest ids win.
// Requires candidates.size() >= slots.size().
Assignment max_weight_assignment(const Matrix& weights, std::span<const std::size_t> slots,
                                 std::span<const std::size_t> candidates);

}  // namespace slotbandit
