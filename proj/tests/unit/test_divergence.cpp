#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "slotbandit/divergence.hpp"
#include "slotbandit/errors.hpp"

using namespace slotbandit;
using slotbandit::testing::pbm_3x2;
using slotbandit::testing::pos_2x2;

TEST_SUITE("divergence") {

TEST_CASE("bernoulli_kl reference values") {
  CHECK(bernoulli_kl(0.5, 0.5) == 0.0);
  CHECK(bernoulli_kl(0.5, 0.25) == doctest::Approx(0.143841036).epsilon(1e-8));
  CHECK(bernoulli_kl(0.6, 0.8) == doctest::Approx(0.104649629).epsilon(1e-8));
  CHECK(bernoulli_kl(0.3, 0.6) == doctest::Approx(0.183787).epsilon(1e-6));
  CHECK(bernoulli_kl(0.5, 0.9) == doctest::Approx(0.510826).epsilon(1e-6));
}

TEST_CASE("bernoulli_kl domain") {
  CHECK_THROWS_AS(bernoulli_kl(0.0, 0.5), DomainError);
  CHECK_THROWS_AS(bernoulli_kl(0.5, 1.0), DomainError);
  CHECK_THROWS_AS(bernoulli_kl(-0.1, 0.5), DomainError);
  CHECK_THROWS_AS(bernoulli_kl(0.5, std::nan("")), DomainError);
}

TEST_CASE("bernoulli_kl properties on random pairs") {
  Rng rng(9);
  for (int i = 0; i < 10000; ++i) {
    const double p = 1e-6 + (1 - 2e-6) * rng.uniform();
    const double q = 1e-6 + (1 - 2e-6) * rng.uniform();
    const double kl = bernoulli_kl(p, q);
    REQUIRE(kl >= 0.0);
    REQUIRE(kl >= 2.0 * (p - q) * (p - q) - 1e-15);
    // Monotone in |q - p| on each side of p.
    const double q2 = q > p ? q + 0.5 * (1.0 - q) : 0.5 * q;
    REQUIRE(bernoulli_kl(p, q2) >= kl);
  }
}

TEST_CASE("slot divergences") {
  const auto pbm = pbm_3x2();
  CHECK(slot_divergence(pbm, 1, 2, 1) == doctest::Approx(0.0523248144).epsilon(1e-8));
  CHECK(slot_divergence(pbm, 0, 2, 2) == 0.0);
  const auto pos = pos_2x2();
  CHECK(slot_divergence(pos, 0, 2, 0) == doctest::Approx(0.510826).epsilon(1e-6));

  CHECK(list_divergence(pbm, {0, 2}, 1, 1) == doctest::Approx(0.0523248144).epsilon(1e-8));
  CHECK(list_divergence(pbm, {0, 2}, 1, 2) == 0.0);
  CHECK(list_divergence(pos, {0, 2}, 1, 1) == doctest::Approx(0.183787).epsilon(1e-6));
}

TEST_CASE("regret table on pbm-3x2") {
  const auto t = regret_table(pbm_3x2());
  const std::vector<double> expected = {0.0, 0.1, 0.05, 0.2, 0.25, 0.3};
  REQUIRE(t.per_list.size() == 6);
  for (std::size_t i = 0; i < 6; ++i) CHECK(t.per_list[i] == doctest::Approx(expected[i]).epsilon(1e-12));
  CHECK(t.list_regret({1, 0}, 3) == doctest::Approx(0.05));
  CHECK(t.per_slot_arm(0, 2) == doctest::Approx(0.25));
  CHECK(t.per_slot_arm(1, 2) == doctest::Approx(0.1));
  CHECK(t.per_slot_arm(0, 0) == 0.0);
  CHECK(t.per_slot_arm(1, 1) == 0.0);
}

TEST_CASE("regret table invariants on random instances") {
  Rng rng(31);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t n = 3 + rng.below(3);
    const std::size_t m = 1 + rng.below(3);
    const auto inst = slotbandit::testing::random_factorized(rng, n, m);
    const auto s = optimal_structure(inst);
    const auto t = regret_table(inst);
    for (std::size_t i = 0; i < t.lists.size(); ++i) {
      CHECK(t.per_list[i] >= 0.0);
      const bool optimal = std::find(s.optimal_lists.begin(), s.optimal_lists.end(), t.lists[i]) != s.optimal_lists.end();
      CHECK(optimal == (t.per_list[i] == 0.0));
    }

    std::vector<double> mu = inst.arm_means();
    std::vector<double> sorted = mu;
    std::sort(sorted.rbegin(), sorted.rend());
    const double mu_m = sorted[m - 1];
    for (Slot k = 0; k < m; ++k) {
      for (Arm j = 0; j < n; ++j) {
        // Independent re-enumeration of Reg(k, j).
        double best = 1e300;
        for (const auto& l : enumerate_lists(n, m)) {
          if (l[k] == j) best = std::min(best, s.optimal_value - expected_list_reward(inst, l));
        }
        CHECK(t.per_slot_arm(k, j) == doctest::Approx(std::max(best, 0.0)).epsilon(1e-12).scale(1.0));
        const double pk = inst.exam_probs()[k];
        CHECK(t.per_slot_arm(k, j) >= pk * (mu_m - mu[j]) - 1e-12);
        if (k == m - 1 && mu[j] <= mu_m) {
          CHECK(t.per_slot_arm(k, j) == doctest::Approx(pk * (mu_m - mu[j])).epsilon(1e-12).scale(1.0));
        }
      }
    }
  }
}

}  // TEST_SUITE
