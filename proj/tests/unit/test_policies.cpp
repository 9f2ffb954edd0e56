#include <doctest.h>

#include <cmath>
#include <map>

#include "fixtures.hpp"
#include "slotbandit/divergence.hpp"
#include "slotbandit/errors.hpp"
#include "slotbandit/policies.hpp"

using namespace slotbandit;
using slotbandit::testing::pbm_3x2;
using slotbandit::testing::pos_2x2;

namespace {

// Plain bisection on the closed-form divergence, independent of the library.
double index_oracle(double mean, std::uint64_t count, std::uint64_t t) {
  const double p = std::clamp(mean, 1e-9, 1.0 - 1e-9);
  const double lt = std::log(static_cast<double>(std::max<std::uint64_t>(t, 2)));
  const double budget = lt + 3.0 * std::log(std::max(lt, 1.0));
  auto kl = [&](double q) { return p * std::log(p / q) + (1 - p) * std::log((1 - p) / (1 - q)); };
  double lo = p, hi = 1.0;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    (static_cast<double>(count) * kl(mid) <= budget ? lo : hi) = mid;
  }
  return std::max(mean, lo);
}

PolicyState arm_state(const std::vector<std::uint64_t>& counts, const std::vector<double>& sums, std::size_t m) {
  PolicyState s(counts.size(), m);
  for (std::size_t j = 0; j < counts.size(); ++j) {
    s.obs_count[j] = counts[j];
    s.obs_sum[j] = sums[j];
    s.mean[j] = sums[j] / static_cast<double>(counts[j]);
  }
  return s;
}

PolicyState pair_state(const Matrix& counts, const Matrix& means) {
  const std::size_t m = counts.rows(), n = counts.cols();
  PolicyState s(n, m);
  for (Slot k = 0; k < m; ++k) {
    for (Arm j = 0; j < n; ++j) {
      s.pair_count[k * n + j] = static_cast<std::uint64_t>(counts(k, j));
      s.pair_mean(k, j) = means(k, j);
      s.pair_sum(k, j) = means(k, j) * counts(k, j);
    }
  }
  return s;
}

InstanceShape shape_of(std::size_t n, std::size_t m, double p_m = 0.5) {
  InstanceShape s;
  s.num_arms = n;
  s.num_slots = m;
  for (Slot k = 0; k < m; ++k) s.slot_order.push_back(k);
  s.min_exam_prob = p_m;
  return s;
}

}  // namespace

TEST_SUITE("klucb") {

TEST_CASE("reference value") {
  // 10 kl(0.5, q) = log 1000 + 3 log log 1000.
  CHECK(klucb_budget(1000) == doctest::Approx(12.705689480730333).epsilon(1e-9));
  CHECK(klucb_index(0.5, 10, 1000) == doctest::Approx(0.979902).epsilon(1e-6));
}

TEST_CASE("agrees with a fine bisection oracle") {
  Rng rng(17);
  for (int i = 0; i < 100; ++i) {
    const double mean = rng.uniform();
    const std::uint64_t count = 1 + rng.below(5000);
    const std::uint64_t t = 2 + rng.below(2'000'000);
    const double q = klucb_index(mean, count, t);
    CHECK(std::abs(q - index_oracle(mean, count, t)) <= 1e-9);
    CHECK(q >= mean);
    CHECK(q < 1.0);
  }
}

TEST_CASE("limits and monotonicity") {
  CHECK(klucb_index(0.5, 100'000'000, 1000) == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(klucb_index(0.3, 0, 10) == 1.0);
  double previous = 0.0;
  for (std::uint64_t t = 2; t < 100'000; t = t * 3 / 2 + 1) {
    const double q = klucb_index(0.4, 20, t);
    CHECK(q >= previous - 1e-9);
    previous = q;
  }
  previous = 1.0;
  for (std::uint64_t c = 1; c < 100'000; c *= 2) {
    const double q = klucb_index(0.4, c, 5000);
    CHECK(q <= previous + 1e-9);
    previous = q;
  }
  CHECK(klucb_index(0.0, 5, 100) >= 0.0);
  CHECK(klucb_index(1.0, 5, 100) == 1.0);
}

}  // TEST_SUITE

TEST_SUITE("algorithm1") {

TEST_CASE("delta defaults and validation") {
  const auto shape = InstanceShape::of(pbm_3x2());
  CHECK(default_delta(shape) == doctest::Approx(0.5 / 36.0));
  CHECK_NOTHROW(check_delta(shape, default_delta(shape)));
  CHECK_THROWS_AS(check_delta(shape, 0.0), ValidationError);
  CHECK_THROWS_AS(check_delta(shape, 0.5 / 18.0), ValidationError);
  CHECK_THROWS_AS(check_delta(shape, -1e-3), ValidationError);
  PolicyParams bad;
  bad.delta = 0.1;
  CHECK_THROWS_AS(make_policy("algorithm1", pbm_3x2(), bad), ValidationError);
  PolicyParams tol;
  tol.index_tolerance = 0.0;
  CHECK_THROWS_AS(make_policy("ranked_ucb", pbm_3x2(), tol), ValidationError);
  CHECK_THROWS_AS(make_policy("thompson", pbm_3x2()), ValidationError);
}

TEST_CASE("decide before initialization is a protocol error") {
  const auto shape = shape_of(3, 2);
  Rng rng(1);
  const auto s = arm_state({2, 2, 1}, {1, 1, 1}, 2);
  CHECK_THROWS_AS(algorithm1_decide(s, shape, shape.slot_order, 0.01, 10, rng), ProtocolError);
  CHECK_THROWS_AS(perslot_decide(PolicyState(3, 2), shape, 10), ProtocolError);
  CHECK_THROWS_AS(ranked_ucb_decide(arm_state({1, 1, 0}, {0, 0, 0}, 2), shape, shape.slot_order, 10), ProtocolError);
}

TEST_CASE("candidate already exploited") {
  const auto shape = shape_of(3, 2);
  Rng rng(1);
  const auto s = arm_state({100, 100, 100}, {90, 80, 60}, 2);
  // t = 301: candidate 301 % 3 = 1, inside the top two.
  const auto d = algorithm1_decide(s, shape, shape.slot_order, default_delta(shape), 301, rng);
  CHECK(d.list == ArmList{0, 1});
  CHECK_FALSE(d.exploring);
}

TEST_CASE("index below the m-th mean keeps the exploitation list") {
  const auto shape = shape_of(3, 2);
  Rng rng(1);
  const auto s = arm_state({5000, 5000, 5000}, {4500, 4000, 1000}, 2);
  const std::uint64_t t = 15002;  // candidate 2
  REQUIRE(klucb_index(0.2, 5000, t) < 0.8);
  const auto d = algorithm1_decide(s, shape, shape.slot_order, default_delta(shape), t, rng);
  CHECK(d.list == ArmList{0, 1});
  CHECK_FALSE(d.exploring);
}

TEST_CASE("index reaching the m-th mean explores at the last slot") {
  const auto shape = shape_of(3, 2);
  Rng rng(1);
  const auto s = arm_state({400, 400, 20}, {360, 320, 12}, 2);
  const std::uint64_t t = 821;  // 821 % 3 = 2
  REQUIRE(klucb_index(0.6, 20, t) >= 0.8);
  const auto d = algorithm1_decide(s, shape, shape.slot_order, default_delta(shape), t, rng);
  CHECK(d.list == ArmList{0, 2});
  CHECK(d.exploring);
  CHECK(d.explored_arm == Arm{2});
  CHECK(d.explored_slot == Slot{1});
}

TEST_CASE("ties in the mean ranking go to the smaller arm id") {
  const auto shape = shape_of(4, 2);
  Rng rng(1);
  const auto s = arm_state({100, 100, 100, 100}, {50, 70, 70, 70}, 2);
  const auto d = algorithm1_decide(s, shape, shape.slot_order, default_delta(shape), 401, rng);  // candidate 1
  CHECK(d.list == ArmList{1, 2});
}

TEST_CASE("padding draws from the run stream when few arms are well observed") {
  const auto shape = shape_of(4, 2);
  // Only arm 0 passes N* > delta t; one arm is drawn to complete the list.
  const auto s = arm_state({1000, 2, 2, 2}, {900, 1, 1, 0}, 2);
  const double delta = default_delta(shape);
  std::map<ArmList, int> seen;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(seed);
    const auto d = algorithm1_decide(s, shape, shape.slot_order, delta, 100000, rng);  // candidate 0
    CHECK(d.list[0] == 0);
    ++seen[d.list];
  }
  CHECK(seen.size() == 3);
  Rng a(5), b(5);
  CHECK(algorithm1_decide(s, shape, shape.slot_order, delta, 100000, a).list ==
        algorithm1_decide(s, shape, shape.slot_order, delta, 100000, b).list);
}

TEST_CASE("exploitation list is invariant to scaling counts and sums") {
  Rng gen(123);
  const auto shape = shape_of(5, 3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::uint64_t> counts(5);
    std::vector<double> sums(5);
    for (std::size_t j = 0; j < 5; ++j) {
      counts[j] = 50 + gen.below(500);
      sums[j] = static_cast<double>(gen.below(counts[j] + 1));
    }
    const auto base = arm_state(counts, sums, 3);
    for (std::uint64_t factor : {2u, 7u}) {
      std::vector<std::uint64_t> c2 = counts;
      std::vector<double> s2 = sums;
      for (auto& c : c2) c *= factor;
      for (auto& s : s2) s *= static_cast<double>(factor);
      const auto scaled = arm_state(c2, s2, 3);
      const std::uint64_t t = 1003;  // candidate arm 3
      Rng r1(1), r2(1);
      const auto d1 = algorithm1_decide(base, shape, shape.slot_order, default_delta(shape), t, r1);
      const auto d2 = algorithm1_decide(scaled, shape, shape.slot_order, default_delta(shape), t, r2);
      if (d1.exploring == d2.exploring) CHECK(d1.list == d2.list);
      for (std::size_t k = 0; k + 1 < 3; ++k) CHECK(d1.list[k] == d2.list[k]);
    }
  }
}

TEST_CASE("update records only examined slots") {
  PolicyState s(3, 2);
  PolicyDecision d;
  d.list = {2, 0};
  Observation none{{0, 0}, {0.0, 0.0}, 0.0};
  algorithm1_update(s, d, none);
  CHECK(s.step_count == 1);
  CHECK(s.obs_count == std::vector<std::uint64_t>{0, 0, 0});
  CHECK(s.mean == std::vector<double>{0.0, 0.0, 0.0});

  Observation hit{{1, 0}, {1.0, 0.0}, 1.0};
  algorithm1_update(s, d, hit);
  algorithm1_update(s, d, Observation{{1, 1}, {0.0, 1.0}, 1.0});
  CHECK(s.obs_count[2] == 2);
  CHECK(s.mean[2] == 0.5);
  CHECK(s.obs_count[0] == 1);
  CHECK(s.mean[0] == 1.0);
  CHECK(s.pair_observations(0, 2) == 2);
  CHECK(s.pair_observations(1, 0) == 1);

  PolicyState a(3, 2), b(3, 2);
  algorithm1_update(a, d, hit);
  algorithm1_update(b, d, hit);
  CHECK(a.obs_sum == b.obs_sum);
  CHECK(a.mean == b.mean);
}

TEST_CASE("every played list is valid and exploration sits in the last slot") {
  const auto inst = pbm_3x2();
  auto policy = make_policy("algorithm1", inst);
  Rng rng(7);
  for (std::uint64_t t = 1; t <= 20000; ++t) {
    const auto& d = policy->decide(t, rng);
    REQUIRE(inst.valid_list(d.list));
    if (d.exploring) REQUIRE(d.explored_slot == Slot{1});
    if (d.exploring) REQUIRE(d.list[1] == *d.explored_arm);
    policy->update(sample_observation(inst, d.list, rng));
  }
  REQUIRE(policy->state() != nullptr);
  for (double mu : policy->state()->mean) {
    CHECK(mu >= 0.0);
    CHECK(mu <= 1.0);
  }
}

}  // TEST_SUITE

TEST_SUITE("perslot") {

TEST_CASE("greedy list already holds the candidate") {
  const auto shape = shape_of(3, 2, 1.0);
  Matrix counts(2, 3, 50.0);
  Matrix means(2, 3);
  means(0, 0) = 0.9;
  means(0, 1) = 0.7;
  means(0, 2) = 0.5;
  means(1, 0) = 0.5;
  means(1, 1) = 0.6;
  means(1, 2) = 0.3;
  const auto s = pair_state(counts, means);
  // Pair index t % 6 = 0 -> slot 0, arm 0.
  const auto d = perslot_decide(s, shape, 600, ExplorationTest::kSlotMean);
  CHECK(d.list == ArmList{0, 1});
  CHECK_FALSE(d.exploring);
}

TEST_CASE("pinning re-optimizes the other slots") {
  const auto shape = shape_of(3, 2, 1.0);
  Matrix counts(2, 3, 5000.0);
  counts(0, 2) = 3.0;
  Matrix means(2, 3);
  means(0, 0) = 0.9;
  means(0, 1) = 0.7;
  means(0, 2) = 0.5;
  means(1, 0) = 0.5;
  means(1, 1) = 0.6;
  means(1, 2) = 0.3;
  const auto s = pair_state(counts, means);
  // t % 6 = 2 -> slot 0, arm 2. With three observations its index is close
  // to 1, above both thresholds.
  for (auto test : {ExplorationTest::kSlotMean, ExplorationTest::kListValue}) {
    const auto d = perslot_decide(s, shape, 6002, test);
    CHECK(d.exploring);
    CHECK(d.explored_slot == Slot{0});
    CHECK(d.explored_arm == Arm{2});
    // Remaining slot 1: best of arms 0 and 1 there is arm 1 (0.6).
    CHECK(d.list == ArmList{2, 1});
  }
}

TEST_CASE("the two exploration tests differ when pinning displaces a better arm") {
  const auto shape = shape_of(3, 2, 1.0);
  Matrix counts(2, 3, 20000.0);
  counts(1, 0) = 400.0;
  Matrix means(2, 3);
  means(0, 0) = 0.9;
  means(0, 1) = 0.7;
  means(0, 2) = 0.5;
  means(1, 0) = 0.5;
  means(1, 1) = 0.6;
  means(1, 2) = 0.3;
  const auto s = pair_state(counts, means);
  const std::uint64_t t = 6003;  // slot 1, arm 0
  const double u = klucb_index(0.5, 400, t);
  REQUIRE(u >= 0.6);              // reaches the incumbent's slot mean
  REQUIRE(u + 0.7 < 0.9 + 0.6);   // but not the greedy list's value
  CHECK(perslot_decide(s, shape, t, ExplorationTest::kSlotMean).exploring);
  CHECK_FALSE(perslot_decide(s, shape, t, ExplorationTest::kListValue).exploring);
}

TEST_CASE("single slot behaves like single-play index exploration") {
  const auto shape = shape_of(3, 1, 1.0);
  Matrix counts(1, 3, 1000.0);
  counts(0, 1) = 10.0;
  Matrix means(1, 3);
  means(0, 0) = 0.8;
  means(0, 1) = 0.5;
  means(0, 2) = 0.1;
  const auto s = pair_state(counts, means);
  for (std::uint64_t t = 3000; t < 3003; ++t) {
    const Arm cand = t % 3;
    const bool expected = cand != 0 && klucb_index(means(0, cand), s.pair_observations(0, cand), t) >= 0.8;
    for (auto test : {ExplorationTest::kSlotMean, ExplorationTest::kListValue}) {
      const auto d = perslot_decide(s, shape, t, test);
      CHECK(d.exploring == expected);
      CHECK(d.list == ArmList{expected ? cand : Arm{0}});
    }
  }
}

TEST_CASE("per-slot policy lists are valid") {
  const auto inst = pos_2x2();
  auto policy = make_policy("perslot", inst);
  Rng rng(3);
  for (std::uint64_t t = 1; t <= 5000; ++t) {
    const auto& d = policy->decide(t, rng);
    REQUIRE(inst.valid_list(d.list));
    if (d.exploring) REQUIRE(d.list[*d.explored_slot] == *d.explored_arm);
    policy->update(sample_observation(inst, d.list, rng));
  }
  CHECK(policy->initialized());
}

}  // TEST_SUITE

TEST_SUITE("baselines") {

TEST_CASE("ranked UCB ordering") {
  const auto shape = shape_of(4, 2);
  const auto equal = arm_state({10, 10, 10, 10}, {5, 5, 5, 5}, 2);
  CHECK(ranked_ucb_decide(equal, shape, shape.slot_order, 100).list == ArmList{0, 1});

  const auto rare = arm_state({1000, 1000, 1, 1000}, {600, 500, 0, 100}, 2);
  CHECK(ranked_ucb_decide(rare, shape, shape.slot_order, 2000).list[0] == 2);

  const auto tight = arm_state({1'000'000, 1'000'000, 1'000'000, 1'000'000}, {200000, 900000, 400000, 100000}, 2);
  CHECK(ranked_ucb_decide(tight, shape, shape.slot_order, 100).list == ArmList{1, 2});
}

TEST_CASE("oracle always plays the optimal list") {
  const auto inst = pbm_3x2();
  auto policy = make_policy("oracle", inst);
  Rng rng(0);
  for (std::uint64_t t = 1; t <= 100; ++t) {
    CHECK(policy->decide(t, rng).list == ArmList{0, 1});
    policy->update(sample_observation(inst, {0, 1}, rng));
  }
}

TEST_CASE("uniform list frequencies") {
  const auto inst = pbm_3x2();
  auto policy = make_policy("uniform", inst);
  Rng rng(12);
  const auto lists = enumerate_lists(inst);
  std::vector<int> hits(lists.size(), 0);
  constexpr int kDraws = 100000;
  for (int t = 1; t <= kDraws; ++t) {
    const auto& d = policy->decide(static_cast<std::uint64_t>(t), rng);
    ++hits[list_rank(d.list, 3)];
  }
  const double p = 1.0 / 6.0;
  const double se = std::sqrt(p * (1 - p) / kDraws);
  for (int h : hits) CHECK(std::abs(h / double(kDraws) - p) <= 3.0 * se);
}

}  // TEST_SUITE
