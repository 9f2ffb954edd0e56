#include "slotbandit/assignment.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace slotbandit {

namespace {

struct Search {
  const Matrix& w;
  std::span<const std::size_t> slots;
  std::vector<std::size_t> cands;
  std::vector<bool> used;
  std::vector<std::size_t> current;
  Assignment best;

  void run(std::size_t depth, double acc) {
    if (depth == slots.size()) {
      if (acc > best.value) {
        best.value = acc;
        best.objects = current;
      }
      return;
    }
    for (std::size_t c = 0; c < cands.size(); ++c) {
      if (used[c]) continue;
      used[c] = true;
      current[depth] = cands[c];
      run(depth + 1, acc + w(slots[depth], cands[c]));
      used[c] = false;
    }
  }
};

}  // namespace

Assignment max_weight_assignment(const Matrix& weights, std::span<const std::size_t> slots,
                                 std::span<const std::size_t> candidates) {
  if (candidates.size() < slots.size()) {
    throw std::invalid_argument("max_weight_assignment: fewer candidates than slots");
  }
  Search s{weights, slots, {candidates.begin(), candidates.end()}, {}, {}, {}};
  std::sort(s.cands.begin(), s.cands.end());
  s.used.assign(s.cands.size(), false);
  s.current.assign(slots.size(), 0);
  s.best.value = -std::numeric_limits<double>::infinity();
  s.run(0, 0.0);
  if (slots.empty()) s.best.value = 0.0;
  return s.best;
}

}  // namespace slotbandit
