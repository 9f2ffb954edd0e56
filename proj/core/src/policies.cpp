#include "slotbandit/policies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "slotbandit/assignment.hpp"
#include "slotbandit/divergence.hpp"
#include "slotbandit/errors.hpp"

namespace slotbandit {

namespace {

constexpr double kMeanClamp = 1e-9;

// Bernoulli KL without the argument checks; q < 1 guaranteed by callers.
double kl_unchecked(double p, double q) {
  return p * std::log(p / q) + (1.0 - p) * std::log((1.0 - p) / (1.0 - q));
}

// Exact form of `klucb_index(mean, count, t) >= level`: the index is the
// largest q with count * kl(mean, q) <= budget, and kl(mean, .) increases
// on [mean, 1).
bool index_reaches(double mean, std::uint64_t count, std::uint64_t t, double level) {
  if (count == 0 || level <= mean) return true;
  if (level >= 1.0) return false;
  const double p = std::clamp(mean, kMeanClamp, 1.0 - kMeanClamp);
  if (level <= p) return true;
  return static_cast<double>(count) * kl_unchecked(p, level) <= klucb_budget(t);
}

// Arms sorted by key descending, ties by id ascending.
template <typename Key>
void sort_by_key_desc(std::vector<Arm>& arms, Key key) {
  std::sort(arms.begin(), arms.end(), [&](Arm a, Arm b) {
    const double ka = key(a);
    const double kb = key(b);
    if (ka != kb) return ka > kb;
    return a < b;
  });
}

ArmList place_in_slots(const std::vector<Arm>& ranked, const std::vector<Slot>& slot_order) {
  std::vector<Arm> slots(slot_order.size());
  for (std::size_t r = 0; r < slot_order.size(); ++r) slots[slot_order[r]] = ranked[r];
  return ArmList(std::move(slots));
}

std::vector<std::size_t> iota_vec(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

}  // namespace

double klucb_budget(std::uint64_t t) {
  const double log_t = std::log(static_cast<double>(std::max<std::uint64_t>(t, 2)));
  return log_t + 3.0 * std::log(std::max(log_t, 1.0));
}

double klucb_index(double mean, std::uint64_t count, std::uint64_t t, double tolerance) {
  if (count == 0) return 1.0;
  const double p = std::clamp(mean, kMeanClamp, 1.0 - kMeanClamp);
  const double limit = klucb_budget(t) / static_cast<double>(count);
  // f(q) = kl(p, q) - limit is convex and increasing on [p, 1). The bracket
  // [lo, hi] keeps f(lo) <= 0 < f(hi); hi moves by Newton steps (which stay
  // right of the root for a convex increasing f) or by bisection, and lo by
  // probing hi - tolerance.
  const double neg_entropy = p * std::log(p) + (1.0 - p) * std::log1p(-p);
  auto f = [&](double q) { return neg_entropy - p * std::log(q) - (1.0 - p) * std::log1p(-q) - limit; };

  double lo = p;
  // Pinsker: kl(p, q) >= 2 (q - p)^2, so the root is at most p + sqrt(limit / 2).
  double hi = std::min(1.0, p + std::sqrt(0.5 * limit) + tolerance);
  double f_hi = hi < 1.0 ? f(hi) : std::numeric_limits<double>::infinity();
  if (f_hi <= 0.0) return std::max(hi, mean);
  for (int iter = 0; iter < 200 && hi - lo > tolerance; ++iter) {
    const double probe = hi - tolerance;
    if (probe > lo && f(probe) <= 0.0) {
      lo = probe;
      break;
    }
    double next = 0.5 * (lo + hi);
    if (std::isfinite(f_hi)) {
      const double slope = (hi - p) / (hi * (1.0 - hi));
      const double newton = hi - f_hi / slope;
      if (newton > lo && newton < hi) next = newton;
    }
    const double f_next = f(next);
    if (f_next > 0.0) {
      hi = next;
      f_hi = f_next;
    } else {
      lo = next;
    }
  }
  return std::max(lo, mean);
}

InstanceShape InstanceShape::of(const ProblemInstance& instance) {
  InstanceShape s;
  s.num_arms = instance.num_arms();
  s.num_slots = instance.num_slots();
  s.slot_order.resize(s.num_slots);
  std::iota(s.slot_order.begin(), s.slot_order.end(), 0);
  s.min_exam_prob = instance.kind() == InstanceKind::kFactorized ? instance.exam_probs().back() : 1.0;
  return s;
}

double default_delta(const InstanceShape& shape) {
  const double n = static_cast<double>(shape.num_arms);
  return shape.min_exam_prob / (4.0 * n * n);
}

void check_delta(const InstanceShape& shape, double delta) {
  const double n = static_cast<double>(shape.num_arms);
  const double upper = shape.min_exam_prob / (2.0 * n * n);
  if (!(delta > 0.0 && delta < upper)) {
    throw ValidationError("policy.params.delta", "must lie in (0, p_m/(2N^2)) = (0, " + std::to_string(upper) + ")");
  }
}

PolicyState::PolicyState(std::size_t num_arms, std::size_t num_slots)
    : obs_count(num_arms, 0),
      obs_sum(num_arms, 0.0),
      mean(num_arms, 0.0),
      pair_count(num_slots * num_arms, 0),
      pair_sum(num_slots, num_arms),
      pair_mean(num_slots, num_arms),
      slot_plays(num_slots, 0),
      slot_exams(num_slots, 0),
      init_remaining(num_arms, 0) {}

bool PolicyState::arm_init_complete() const {
  return std::all_of(init_remaining.begin(), init_remaining.end(), [](auto r) { return r == 0; });
}

bool PolicyState::pair_init_complete() const {
  return std::all_of(pair_count.begin(), pair_count.end(), [](auto c) { return c > 0; });
}

void record_observation(PolicyState& state, const PolicyDecision& decision, const Observation& obs) {
  const std::size_t n = state.obs_count.size();
  const auto& list = decision.list;
  for (Slot k = 0; k < list.size(); ++k) {
    ++state.slot_plays[k];
    if (!obs.exam[k]) continue;
    ++state.slot_exams[k];
    const Arm a = list[k];
    const double f = obs.values[k];
    ++state.obs_count[a];
    state.obs_sum[a] += f;
    state.mean[a] = state.obs_sum[a] / static_cast<double>(state.obs_count[a]);
    if (state.init_remaining[a] > 0) --state.init_remaining[a];
    auto& c = state.pair_count[k * n + a];
    ++c;
    state.pair_sum(k, a) += f;
    state.pair_mean(k, a) = state.pair_sum(k, a) / static_cast<double>(c);
  }
  ++state.step_count;
}

void algorithm1_update(PolicyState& state, const PolicyDecision& decision, const Observation& obs) {
  record_observation(state, decision, obs);
}

std::vector<Slot> effective_slot_order(const PolicyState& state, const InstanceShape& shape, bool estimate) {
  if (!estimate) return shape.slot_order;
  std::vector<Slot> order(shape.num_slots);
  std::iota(order.begin(), order.end(), 0);
  auto rate = [&](Slot k) {
    return state.slot_plays[k] == 0 ? 1.0
                                    : static_cast<double>(state.slot_exams[k]) / static_cast<double>(state.slot_plays[k]);
  };
  std::stable_sort(order.begin(), order.end(), [&](Slot a, Slot b) { return rate(a) > rate(b); });
  return order;
}

PolicyDecision algorithm1_decide(const PolicyState& state, const InstanceShape& shape,
                                 const std::vector<Slot>& slot_order, double delta, std::uint64_t t,
                                 Rng& rng, double index_tolerance) {
  const std::size_t n = shape.num_arms;
  const std::size_t m = shape.num_slots;
  for (Arm j = 0; j < n; ++j) {
    if (state.obs_count[j] < m) {
      throw ProtocolError("algorithm1_decide: arm " + std::to_string(j + 1) + " has fewer than m observations");
    }
  }

  const Arm candidate = static_cast<Arm>(t % n);

  // Well-observed arms.
  std::vector<Arm> group;
  std::vector<bool> in_group(n, false);
  const double threshold = delta * static_cast<double>(t);
  for (Arm j = 0; j < n; ++j) {
    if (static_cast<double>(state.obs_count[j]) > threshold) {
      group.push_back(j);
      in_group[j] = true;
    }
  }
  if (group.size() < m) {
    std::vector<Arm> outside;
    for (Arm j = 0; j < n; ++j) {
      if (!in_group[j]) outside.push_back(j);
    }
    while (group.size() < m) {
      const std::size_t pick = rng.below(outside.size());
      group.push_back(outside[pick]);
      outside.erase(outside.begin() + static_cast<std::ptrdiff_t>(pick));
    }
  }

  sort_by_key_desc(group, [&](Arm a) { return state.mean[a]; });
  group.resize(m);

  PolicyDecision d;
  if (std::find(group.begin(), group.end(), candidate) != group.end()) {
    d.list = place_in_slots(group, slot_order);
    return d;
  }
  (void)index_tolerance;
  if (!index_reaches(state.mean[candidate], state.obs_count[candidate], t, state.mean[group[m - 1]])) {
    d.list = place_in_slots(group, slot_order);
    return d;
  }
  group[m - 1] = candidate;
  d.list = place_in_slots(group, slot_order);
  d.exploring = true;
  d.explored_arm = candidate;
  d.explored_slot = slot_order[m - 1];
  return d;
}

PolicyDecision perslot_decide(const PolicyState& state, const InstanceShape& shape, std::uint64_t t,
                              ExplorationTest test, double index_tolerance) {
  if (!state.pair_init_complete()) {
    throw ProtocolError("perslot_decide: some (slot, arm) pair has not been observed");
  }
  const std::size_t n = shape.num_arms;
  const std::size_t m = shape.num_slots;
  const std::uint64_t pair = t % static_cast<std::uint64_t>(n * m);
  const Slot k_star = static_cast<Slot>(pair / n);
  const Arm j_star = static_cast<Arm>(pair % n);

  const auto all_slots = iota_vec(m);
  const auto all_arms = iota_vec(n);
  const Assignment greedy = max_weight_assignment(state.pair_mean, all_slots, all_arms);

  PolicyDecision d;
  d.list = ArmList(greedy.objects);
  if (greedy.objects[k_star] == j_star) return d;

  (void)index_tolerance;
  // Best completion of the other slots with j* pinned at k*.
  std::vector<Slot> other_slots;
  for (Slot k = 0; k < m; ++k) {
    if (k != k_star) other_slots.push_back(k);
  }
  std::vector<Arm> other_arms;
  for (Arm a = 0; a < n; ++a) {
    if (a != j_star) other_arms.push_back(a);
  }
  const Assignment rest = max_weight_assignment(state.pair_mean, other_slots, other_arms);

  const double level = test == ExplorationTest::kSlotMean ? state.pair_mean(k_star, greedy.objects[k_star])
                                                          : greedy.value - rest.value;
  const bool explore =
      index_reaches(state.pair_mean(k_star, j_star), state.pair_observations(k_star, j_star), t, level);
  if (!explore) return d;

  std::vector<Arm> arms(m);
  arms[k_star] = j_star;
  for (std::size_t i = 0; i < other_slots.size(); ++i) arms[other_slots[i]] = rest.objects[i];
  d.list = ArmList(std::move(arms));
  d.exploring = true;
  d.explored_arm = j_star;
  d.explored_slot = k_star;
  return d;
}

PolicyDecision ranked_ucb_decide(const PolicyState& state, const InstanceShape& shape,
                                 const std::vector<Slot>& slot_order, std::uint64_t t, double index_tolerance) {
  const std::size_t n = shape.num_arms;
  for (Arm j = 0; j < n; ++j) {
    if (state.obs_count[j] == 0) {
      throw ProtocolError("ranked_ucb_decide: arm " + std::to_string(j + 1) + " has no observation");
    }
  }
  std::vector<double> index(n);
  for (Arm j = 0; j < n; ++j) index[j] = klucb_index(state.mean[j], state.obs_count[j], t, index_tolerance);
  std::vector<Arm> arms = iota_vec(n);
  sort_by_key_desc(arms, [&](Arm a) { return index[a]; });
  arms.resize(shape.num_slots);
  PolicyDecision d;
  d.list = place_in_slots(arms, slot_order);
  return d;
}

namespace {

// Shared initialization: the arm owing observations next in round-robin
// order goes to the most examined slot; the other slots take the arms that
// follow it cyclically.
class IndexPolicyBase : public Policy {
 public:
  IndexPolicyBase(InstanceShape shape, PolicyParams params, std::uint64_t required_obs)
      : shape_(std::move(shape)), params_(params), state_(shape_.num_arms, shape_.num_slots) {
    std::fill(state_.init_remaining.begin(), state_.init_remaining.end(), required_obs);
  }

  const InstanceShape& shape() const override { return shape_; }
  const PolicyState* state() const override { return &state_; }
  bool initialized() const override { return state_.arm_init_complete(); }

  void update(const Observation& obs) override { record_observation(state_, decision_, obs); }

 protected:
  const PolicyDecision& init_decision() {
    const std::size_t n = shape_.num_arms;
    Arm a = state_.init_cursor % n;
    while (state_.init_remaining[a] == 0) a = (a + 1) % n;
    state_.init_cursor = (a + 1) % n;
    const auto order = effective_slot_order(state_, shape_, params_.estimate_slot_order);
    std::vector<Arm> ranked(shape_.num_slots);
    for (std::size_t r = 0; r < ranked.size(); ++r) ranked[r] = (a + r) % n;
    decision_ = PolicyDecision{place_in_slots(ranked, order), false, std::nullopt, std::nullopt};
    return decision_;
  }

  InstanceShape shape_;
  PolicyParams params_;
  PolicyState state_;
  PolicyDecision decision_;
};

class Algorithm1Policy final : public IndexPolicyBase {
 public:
  Algorithm1Policy(InstanceShape shape, PolicyParams params)
      : IndexPolicyBase(std::move(shape), params, 0) {
    std::fill(state_.init_remaining.begin(), state_.init_remaining.end(), shape_.num_slots);
    delta_ = params.delta.value_or(default_delta(shape_));
    check_delta(shape_, delta_);
  }

  std::string_view name() const override { return "algorithm1"; }

  const PolicyDecision& decide(std::uint64_t t, Rng& rng) override {
    if (!initialized()) return init_decision();
    const auto order = effective_slot_order(state_, shape_, params_.estimate_slot_order);
    decision_ = algorithm1_decide(state_, shape_, order, delta_, t, rng, params_.index_tolerance);
    return decision_;
  }

 private:
  double delta_ = 0.0;
};

class RankedUcbPolicy final : public IndexPolicyBase {
 public:
  RankedUcbPolicy(InstanceShape shape, PolicyParams params) : IndexPolicyBase(std::move(shape), params, 1) {}

  std::string_view name() const override { return "ranked_ucb"; }

  const PolicyDecision& decide(std::uint64_t t, Rng&) override {
    if (!initialized()) return init_decision();
    const auto order = effective_slot_order(state_, shape_, params_.estimate_slot_order);
    decision_ = ranked_ucb_decide(state_, shape_, order, t, params_.index_tolerance);
    return decision_;
  }
};

class PerSlotPolicy final : public IndexPolicyBase {
 public:
  PerSlotPolicy(InstanceShape shape, PolicyParams params) : IndexPolicyBase(std::move(shape), params, 0) {}

  std::string_view name() const override { return "perslot"; }
  bool initialized() const override { return state_.pair_init_complete(); }

  const PolicyDecision& decide(std::uint64_t t, Rng&) override {
    if (!initialized()) {
      // Cyclic shifts: within N steps every arm visits every slot.
      const std::size_t n = shape_.num_arms;
      std::vector<Arm> arms(shape_.num_slots);
      for (Slot k = 0; k < arms.size(); ++k) arms[k] = (init_shift_ + k) % n;
      init_shift_ = (init_shift_ + 1) % n;
      decision_ = PolicyDecision{ArmList(std::move(arms)), false, std::nullopt, std::nullopt};
      return decision_;
    }
    decision_ = perslot_decide(state_, shape_, t, params_.exploration_test, params_.index_tolerance);
    return decision_;
  }

 private:
  std::size_t init_shift_ = 0;
};

class OraclePolicy final : public Policy {
 public:
  OraclePolicy(InstanceShape shape, ArmList best) : shape_(std::move(shape)) { decision_.list = std::move(best); }

  std::string_view name() const override { return "oracle"; }
  const InstanceShape& shape() const override { return shape_; }
  const PolicyDecision& decide(std::uint64_t, Rng&) override { return decision_; }
  void update(const Observation&) override {}

 private:
  InstanceShape shape_;
  PolicyDecision decision_;
};

class UniformPolicy final : public Policy {
 public:
  explicit UniformPolicy(InstanceShape shape) : shape_(std::move(shape)) {
    decision_.list = ArmList(std::vector<Arm>(shape_.num_slots));
    pool_.resize(shape_.num_arms);
  }

  std::string_view name() const override { return "uniform"; }
  const InstanceShape& shape() const override { return shape_; }

  const PolicyDecision& decide(std::uint64_t, Rng& rng) override {
    // Partial Fisher-Yates over the arm ids.
    std::iota(pool_.begin(), pool_.end(), 0);
    for (Slot k = 0; k < shape_.num_slots; ++k) {
      const std::size_t pick = k + rng.below(pool_.size() - k);
      std::swap(pool_[k], pool_[pick]);
      decision_.list[k] = pool_[k];
    }
    return decision_;
  }
  void update(const Observation&) override {}

 private:
  InstanceShape shape_;
  std::vector<Arm> pool_;
  PolicyDecision decision_;
};

}  // namespace

bool is_policy_name(std::string_view name) {
  return std::find(std::begin(kPolicyNames), std::end(kPolicyNames), name) != std::end(kPolicyNames);
}

std::unique_ptr<Policy> make_policy(std::string_view name, const ProblemInstance& instance,
                                    const PolicyParams& params) {
  if (!(params.index_tolerance > 0.0 && params.index_tolerance < 0.1)) {
    throw ValidationError("policy.params.index_tolerance", "must lie in (0, 0.1)");
  }
  auto shape = InstanceShape::of(instance);
  if (name == "algorithm1") return std::make_unique<Algorithm1Policy>(std::move(shape), params);
  if (name == "perslot") return std::make_unique<PerSlotPolicy>(std::move(shape), params);
  if (name == "ranked_ucb") return std::make_unique<RankedUcbPolicy>(std::move(shape), params);
  if (name == "oracle") {
    return std::make_unique<OraclePolicy>(std::move(shape), optimal_structure(instance).optimal_lists.front());
  }
  if (name == "uniform") return std::make_unique<UniformPolicy>(std::move(shape));
  throw ValidationError("policy.name", "unknown policy '" + std::string(name) + "'");
}

}  // namespace slotbandit
