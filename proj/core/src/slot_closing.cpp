#include "slotbandit/slot_closing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "slotbandit/assignment.hpp"
#include "slotbandit/errors.hpp"

namespace slotbandit {

namespace {

struct Enumerator {
  const std::vector<double>& step_value;  // indexed by closed-slot mask
  std::size_t steps;
  double full_value;
  SlotClosingReport report;

  void run(unsigned remaining, std::size_t groups, double acc, bool singletons) {
    if (remaining == 0) {
      const double total = acc + static_cast<double>(steps - groups) * full_value;
      ++report.schedules;
      report.global_best = std::max(report.global_best, total);
      if (singletons) report.one_per_step_best = std::max(report.one_per_step_best, total);
      return;
    }
    // Non-empty sub-masks of `remaining`.
    for (unsigned g = remaining; g != 0; g = (g - 1) & remaining) {
      const bool single = (g & (g - 1)) == 0;
      run(remaining & ~g, groups + 1, acc + step_value[g], singletons && single);
    }
  }
};

}  // namespace

SlotClosingReport verify_slot_closing(const Matrix& rewards, const std::vector<std::size_t>& slots_to_close) {
  const std::size_t m = rewards.rows();
  if (m == 0 || rewards.cols() != m) throw ValidationError("rewards", "must be a non-empty square matrix");
  if (m > kMaxClosingSlots) throw ValidationError("m", "exhaustive check supports m <= 4");
  if (slots_to_close.size() > m) throw ValidationError("slots_to_close", "more slots than the matrix has");
  unsigned close_mask = 0;
  for (std::size_t k : slots_to_close) {
    if (k >= m) throw ValidationError("slots_to_close", "slot out of range");
    if (close_mask & (1u << k)) throw ValidationError("slots_to_close", "repeated slot");
    close_mask |= 1u << k;
  }

  std::vector<std::size_t> objects(m);
  std::iota(objects.begin(), objects.end(), 0);
  // Best single-step reward for every set of closed slots.
  std::vector<double> step_value(std::size_t{1} << m, 0.0);
  for (unsigned closed = 0; closed < (1u << m); ++closed) {
    std::vector<std::size_t> open;
    for (std::size_t k = 0; k < m; ++k) {
      if (!(closed & (1u << k))) open.push_back(k);
    }
    step_value[closed] = max_weight_assignment(rewards, open, objects).value;
  }

  Enumerator e{step_value, slots_to_close.size(), step_value[0], {}};
  e.report.global_best = -std::numeric_limits<double>::infinity();
  e.report.one_per_step_best = -std::numeric_limits<double>::infinity();
  e.run(close_mask, 0, 0.0, true);
  const double scale = std::max(1.0, std::abs(e.report.global_best));
  e.report.equal = e.report.global_best - e.report.one_per_step_best <= 1e-9 * scale;
  return e.report;
}

}  // namespace slotbandit
