#include <benchmark/benchmark.h>

#include "slotbandit/bounds.hpp"
#include "slotbandit/policies.hpp"
#include "slotbandit/simulation.hpp"
#include "slotbandit/slot_closing.hpp"

namespace sb = slotbandit;

namespace {

sb::ProblemInstance pbm() { return sb::ProblemInstance::factorized({1.0, 0.5}, {0.9, 0.8, 0.6}); }

void BM_KlucbIndex(benchmark::State& state) {
  sb::Rng rng(1);
  std::uint64_t t = 1000;
  for (auto _ : state) {
    const double mean = rng.uniform();
    benchmark::DoNotOptimize(sb::klucb_index(mean, 1 + (t & 1023), t));
    ++t;
  }
}
BENCHMARK(BM_KlucbIndex);

void BM_BoundProgram(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto m = static_cast<std::size_t>(state.range(1));
  std::vector<double> p(m), mu(n);
  for (std::size_t k = 0; k < m; ++k) p[k] = 1.0 / static_cast<double>(k + 1);
  for (std::size_t j = 0; j < n; ++j) mu[j] = 0.9 - 0.8 * static_cast<double>(j) / static_cast<double>(n);
  const auto inst = sb::ProblemInstance::factorized(p, mu);
  const auto lp = sb::build_lp(inst);
  for (auto _ : state) benchmark::DoNotOptimize(sb::solve_lp(lp).objective);
  state.counters["columns"] = static_cast<double>(lp.lists.size());
}
BENCHMARK(BM_BoundProgram)->Args({3, 2})->Args({5, 3})->Args({6, 3})->Args({7, 3});

void BM_SlotClosing(benchmark::State& state) {
  sb::Matrix r(4, 4);
  sb::Rng rng(2);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) r(i, j) = rng.uniform();
  }
  for (auto _ : state) benchmark::DoNotOptimize(sb::verify_slot_closing(r, {0, 1, 2, 3}).equal);
}
BENCHMARK(BM_SlotClosing);

void BM_Episode(benchmark::State& state, const char* policy) {
  const auto inst = pbm();
  const auto regrets = sb::regret_table(inst);
  sb::RunConfig config;
  config.horizon = 100'000;
  config.policy = policy;
  config.checkpoints = {config.horizon};
  std::uint64_t seed = 0;
  for (auto _ : state) {
    auto p = sb::make_policy(policy, inst);
    benchmark::DoNotOptimize(sb::run_episode(inst, regrets, *p, config, seed++).regret.back());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * config.horizon));
}
BENCHMARK_CAPTURE(BM_Episode, algorithm1, "algorithm1")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Episode, ranked_ucb, "ranked_ucb")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Episode, perslot, "perslot")->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
