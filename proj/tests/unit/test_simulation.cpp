#include <doctest.h>

#include <cmath>
#include <numeric>

#include "fixtures.hpp"
#include "slotbandit/errors.hpp"
#include "slotbandit/simulation.hpp"

using namespace slotbandit;
using slotbandit::testing::pbm_3x2;
using slotbandit::testing::pos_2x2;

namespace {

RunConfig config(const std::string& policy, std::uint64_t horizon, std::size_t replications = 1) {
  RunConfig c;
  c.policy = policy;
  c.horizon = horizon;
  c.replications = replications;
  c.master_seed = 2718;
  c.threads = 2;
  return c;
}

// Recomputes sum_pi N_t(pi) Reg(pi) in list order and compares exactly.
void check_bookkeeping(const RunResult& r, const RegretTable& regrets) {
  REQUIRE(r.checkpoint_list_plays.size() == r.checkpoints.size());
  for (std::size_t c = 0; c < r.checkpoints.size(); ++c) {
    double sum = 0.0;
    std::uint64_t plays = 0;
    for (std::size_t i = 0; i < regrets.per_list.size(); ++i) {
      sum += static_cast<double>(r.checkpoint_list_plays[c][i]) * regrets.per_list[i];
      plays += r.checkpoint_list_plays[c][i];
    }
    CHECK(r.regret[c] == sum);
    CHECK(plays == r.checkpoints[c]);
    CHECK(std::abs(r.running_regret[c] - sum) <= 1e-9 * std::max(1.0, sum));
  }
}

}  // namespace

TEST_SUITE("simulation") {

TEST_CASE("default checkpoints") {
  const auto c = default_checkpoints(1'000'000);
  CHECK(c.front() == 1000);
  CHECK(c.back() == 1'000'000);
  CHECK(c.size() == 16);
  CHECK(std::is_sorted(c.begin(), c.end()));
  const auto small = default_checkpoints(500);
  CHECK(small.front() == 10);
  CHECK(small.back() == 500);
  CHECK(default_checkpoints(1) == std::vector<std::uint64_t>{1});
}

TEST_CASE("config validation") {
  auto c = config("oracle", 100);
  c.checkpoints = {10, 5};
  CHECK_THROWS_AS(validate(c), ValidationError);
  c.checkpoints = {10, 101};
  CHECK_THROWS_AS(validate(c), ValidationError);
  c.checkpoints = {};
  c.replications = 0;
  CHECK_THROWS_AS(validate(c), ValidationError);
  c = config("nope", 100);
  CHECK_THROWS_AS(validate(c), ValidationError);
}

TEST_CASE("oracle has zero regret") {
  const auto inst = pbm_3x2();
  auto c = config("oracle", 5000, 3);
  const auto agg = run_replicated(inst, c);
  for (double v : agg.regret_mean) CHECK(v == 0.0);
  for (const auto& r : agg.runs) {
    CHECK(r.list_plays[0] == 5000);
    CHECK(r.regret.back() == 0.0);
  }
  CHECK(agg.slope == 0.0);
}

TEST_CASE("uniform policy regret grows linearly at the mean list regret") {
  const auto inst = pbm_3x2();
  auto c = config("uniform", 200000, 4);
  const auto agg = run_replicated(inst, c);
  const double per_step = agg.regret_mean.back() / 200000.0;
  CHECK(per_step == doctest::Approx(0.15).epsilon(0.01));
}

TEST_CASE("same seed gives identical results") {
  const auto inst = pbm_3x2();
  for (const char* name : {"algorithm1", "ranked_ucb", "uniform", "perslot"}) {
    auto c = config(name, 20000);
    CHECK(run_episode(inst, c) == run_episode(inst, c));
  }
  auto c = config("algorithm1", 20000, 3);
  c.threads = 1;
  const auto serial = run_replicated(inst, c);
  c.threads = 3;
  const auto parallel = run_replicated(inst, c);
  CHECK(serial.regret_mean == parallel.regret_mean);
  CHECK(serial.regret_stderr == parallel.regret_stderr);
}

TEST_CASE("aggregation is independent of replication order") {
  const auto inst = pbm_3x2();
  auto c = config("algorithm1", 5000, 4);
  auto agg = run_replicated(inst, c);
  auto runs = agg.runs;
  std::swap(runs[0], runs[3]);
  std::swap(runs[1], runs[2]);
  const auto again = aggregate(runs);
  for (std::size_t i = 0; i < agg.regret_mean.size(); ++i) {
    CHECK(again.regret_mean[i] == doctest::Approx(agg.regret_mean[i]).epsilon(1e-14));
    CHECK(again.regret_stderr[i] == doctest::Approx(agg.regret_stderr[i]).epsilon(1e-12));
  }

  RunResult one = agg.runs[0];
  const auto twin = aggregate({one, one});
  for (double se : twin.regret_stderr) CHECK(se == 0.0);
}

TEST_CASE("bookkeeping identity and counters") {
  for (const auto& inst : {pbm_3x2(), pos_2x2()}) {
    const auto regrets = regret_table(inst);
    for (const char* name : {"algorithm1", "perslot", "ranked_ucb", "uniform", "oracle"}) {
      auto c = config(name, 30000);
      c.record_checkpoint_counts = true;
      c.checkpoints = {1, 2, 3, 10, 99, 1000, 4321, 30000};
      const auto r = run_episode(inst, c);
      check_bookkeeping(r, regrets);
      for (std::size_t i = 1; i < r.regret.size(); ++i) CHECK(r.regret[i] >= r.regret[i - 1]);
      CHECK(std::accumulate(r.list_plays.begin(), r.list_plays.end(), std::uint64_t{0}) == 30000);

      // Plays of arm j in slot k sum to the list plays containing j at k.
      const std::size_t n = inst.num_arms(), m = inst.num_slots();
      std::vector<std::uint64_t> from_lists(m * n, 0);
      for (std::size_t i = 0; i < regrets.lists.size(); ++i) {
        for (Slot k = 0; k < m; ++k) from_lists[k * n + regrets.lists[i][k]] += r.list_plays[i];
      }
      CHECK(from_lists == r.slot_arm_plays);
      for (Arm j = 0; j < n; ++j) {
        std::uint64_t plays = 0;
        for (Slot k = 0; k < m; ++k) plays += r.slot_arm(k, j, n);
        CHECK(r.arm_observations[j] <= plays);
      }
      CHECK(r.regret_over_log[0] == 0.0);
      CHECK(r.regret_over_log.back() == doctest::Approx(r.regret.back() / std::log(30000.0)));
    }
  }
}

TEST_CASE("shape mismatch is a run error") {
  const auto inst = pbm_3x2();
  const auto other = ProblemInstance::factorized({1.0, 0.5}, {0.9, 0.8, 0.6, 0.1});
  auto policy = make_policy("algorithm1", other);
  CHECK_THROWS_AS(run_episode(inst, regret_table(inst), *policy, config("algorithm1", 10), 1), RunError);
}

TEST_CASE("slope estimate") {
  std::vector<std::uint64_t> t = default_checkpoints(1'000'000);
  std::vector<double> exact, flat;
  for (auto x : t) {
    exact.push_back(5.0 * std::log(static_cast<double>(x)));
    flat.push_back(0.0);
  }
  CHECK(slope_estimate(t, exact) == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(slope_estimate(t, flat) == 0.0);
  const std::vector<std::uint64_t> few = {10, 1000, 1'000'000};
  const std::vector<double> vals = {1, 2, 3};
  CHECK_THROWS_AS(slope_estimate(few, vals), ValidationError);
}

TEST_CASE("seed derivation is stable") {
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
  static_assert(derive_seed(7, 3) == derive_seed(7, 3));
  Rng a(derive_seed(9, 4)), b(derive_seed(9, 4));
  for (int i = 0; i < 10; ++i) CHECK(a.next() == b.next());
}

}  // TEST_SUITE
