#pragma once

// Exhaustive check that closing one slot per step is an optimal schedule.
//
// Setting: m slots, m objects, reward r(k, j) for object j in slot k. Each
// slot of a chosen subset is closed at exactly one of t = |subset| steps; at
// every step the open slots receive a maximum-weight assignment of distinct
// objects. A schedule is an ordered partition of the subset into non-empty
// groups, one group closed per step; when there are fewer groups than t the
// remaining steps close nothing.

#include <cstddef>
#include <vector>

#include "slotbandit/matrix.hpp"

namespace slotbandit {

struct SlotClosingReport {
  double global_best = 0.0;        // over every schedule
  double one_per_step_best = 0.0;  // over schedules closing a single slot per step
  bool equal = false;
  std::size_t schedules = 0;       // ordered partitions enumerated
};

inline constexpr std::size_t kMaxClosingSlots = 4;

// `rewards` is m x m, m <= kMaxClosingSlots. `slots_to_close` holds distinct
// 0-based slots. Throws ValidationError otherwise.
SlotClosingReport verify_slot_closing(const Matrix& rewards, const std::vector<std::size_t>& slots_to_close);

}  // namespace slotbandit
