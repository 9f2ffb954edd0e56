#include "slotbandit/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "slotbandit/errors.hpp"
#include "slotbandit/random.hpp"

namespace slotbandit {

std::vector<std::uint64_t> default_checkpoints(std::uint64_t horizon, int per_decade) {
  std::vector<std::uint64_t> out;
  if (horizon == 0) return out;
  const int first_decade = horizon >= 1000 ? 3 : 1;
  for (int i = first_decade * per_decade;; ++i) {
    const double v = std::pow(10.0, static_cast<double>(i) / per_decade);
    const auto step = static_cast<std::uint64_t>(std::llround(v));
    if (step >= horizon) break;
    if (out.empty() || step > out.back()) out.push_back(step);
  }
  out.push_back(horizon);
  return out;
}

void validate(const RunConfig& config) {
  if (config.horizon < 1) throw ValidationError("run.horizon", "must be at least 1");
  if (config.replications < 1) throw ValidationError("run.replications", "must be at least 1");
  for (std::size_t i = 0; i < config.checkpoints.size(); ++i) {
    const auto c = config.checkpoints[i];
    if (c < 1 || c > config.horizon) throw ValidationError("run.checkpoints", "must lie in [1, horizon]");
    if (i > 0 && c <= config.checkpoints[i - 1]) throw ValidationError("run.checkpoints", "must be increasing");
  }
  if (!is_policy_name(config.policy)) throw ValidationError("policy.name", "unknown policy '" + config.policy + "'");
}

RunResult run_episode(const ProblemInstance& instance, const RegretTable& regrets, Policy& policy,
                      const RunConfig& config, std::uint64_t seed) {
  const std::size_t n = instance.num_arms();
  const std::size_t m = instance.num_slots();
  if (policy.shape().num_arms != n || policy.shape().num_slots != m) {
    throw RunError("policy shape (" + std::to_string(policy.shape().num_arms) + " arms, " +
                   std::to_string(policy.shape().num_slots) + " slots) does not match the instance");
  }
  const auto checkpoints = config.checkpoints.empty() ? default_checkpoints(config.horizon) : config.checkpoints;

  RunResult res;
  res.seed = seed;
  res.checkpoints = checkpoints;
  res.list_plays.assign(regrets.lists.size(), 0);
  res.slot_arm_plays.assign(m * n, 0);
  res.arm_observations.assign(n, 0);

  Rng rng(seed);
  Observation obs;
  double running = 0.0;
  std::size_t next = 0;
  for (std::uint64_t t = 1; t <= config.horizon; ++t) {
    const bool init = !policy.initialized();
    const PolicyDecision& d = policy.decide(t, rng);
    if (!instance.valid_list(d.list)) throw RunError("policy " + std::string(policy.name()) + " produced an invalid list");
    const std::size_t rank = list_rank(d.list, n);
    sample_observation_into(instance, d.list, rng, obs);

    ++res.list_plays[rank];
    running += regrets.per_list[rank];
    for (Slot k = 0; k < m; ++k) {
      ++res.slot_arm_plays[k * n + d.list[k]];
      if (obs.exam[k]) ++res.arm_observations[d.list[k]];
    }
    if (init) ++res.init_steps;
    if (d.exploring) ++res.exploration_steps;
    policy.update(obs);

    if (next < checkpoints.size() && t == checkpoints[next]) {
      double reg = 0.0;
      for (std::size_t i = 0; i < res.list_plays.size(); ++i) {
        reg += static_cast<double>(res.list_plays[i]) * regrets.per_list[i];
      }
      res.regret.push_back(reg);
      res.running_regret.push_back(running);
      res.regret_over_log.push_back(t > 1 ? reg / std::log(static_cast<double>(t)) : 0.0);
      if (config.record_checkpoint_counts) res.checkpoint_list_plays.push_back(res.list_plays);
      ++next;
    }
  }
  return res;
}

RunResult run_episode(const ProblemInstance& instance, const RunConfig& config) {
  validate(config);
  const auto regrets = regret_table(instance);
  auto policy = make_policy(config.policy, instance, config.params);
  return run_episode(instance, regrets, *policy, config, derive_seed(config.master_seed, 0));
}

namespace {

void mean_and_stderr(const std::vector<double>& xs, double& mean, double& se) {
  const double r = static_cast<double>(xs.size());
  mean = 0.0;
  for (double x : xs) mean += x;
  mean /= r;
  se = 0.0;
  if (xs.size() < 2) return;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  se = std::sqrt(ss / (r - 1.0) / r);
}

}  // namespace

AggregateResult aggregate(std::vector<RunResult> runs) {
  AggregateResult agg;
  if (runs.empty()) return agg;
  agg.checkpoints = runs.front().checkpoints;
  const std::size_t c = agg.checkpoints.size();
  agg.regret_mean.resize(c);
  agg.regret_stderr.resize(c);
  agg.ratio_mean.resize(c);
  agg.ratio_stderr.resize(c);
  std::vector<double> column(runs.size());
  for (std::size_t i = 0; i < c; ++i) {
    for (std::size_t r = 0; r < runs.size(); ++r) column[r] = runs[r].regret.at(i);
    mean_and_stderr(column, agg.regret_mean[i], agg.regret_stderr[i]);
    for (std::size_t r = 0; r < runs.size(); ++r) column[r] = runs[r].regret_over_log.at(i);
    mean_and_stderr(column, agg.ratio_mean[i], agg.ratio_stderr[i]);
  }
  auto mean_counts = [&](auto member) {
    const auto& first = runs.front().*member;
    std::vector<double> out(first.size(), 0.0);
    for (const auto& run : runs) {
      const auto& v = run.*member;
      for (std::size_t i = 0; i < out.size(); ++i) out[i] += static_cast<double>(v[i]);
    }
    for (double& x : out) x /= static_cast<double>(runs.size());
    return out;
  };
  agg.list_plays_mean = mean_counts(&RunResult::list_plays);
  agg.slot_arm_plays_mean = mean_counts(&RunResult::slot_arm_plays);
  agg.arm_observations_mean = mean_counts(&RunResult::arm_observations);

  const std::uint64_t last = agg.checkpoints.back();
  const auto in_decade = std::count_if(agg.checkpoints.begin(), agg.checkpoints.end(),
                                       [&](std::uint64_t t) { return t * 10 >= last; });
  if (in_decade >= 3) {
    agg.slope = slope_estimate(agg.checkpoints, agg.regret_mean);
    agg.slope_defined = true;
  }
  agg.runs = std::move(runs);
  return agg;
}

AggregateResult run_replicated(const ProblemInstance& instance, const RunConfig& config) {
  validate(config);
  const auto regrets = regret_table(instance);
  // Build once up front so parameter errors surface before any work starts.
  make_policy(config.policy, instance, config.params);

  std::vector<RunResult> runs(config.replications);
  std::size_t threads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, config.replications);

  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    while (true) {
      const std::size_t r = next.fetch_add(1);
      if (r >= config.replications) return;
      try {
        auto policy = make_policy(config.policy, instance, config.params);
        runs[r] = run_episode(instance, regrets, *policy, config, derive_seed(config.master_seed, r));
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = config.replications;
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
  return aggregate(std::move(runs));
}

double slope_estimate(std::span<const std::uint64_t> checkpoints, std::span<const double> regret) {
  if (checkpoints.size() != regret.size() || checkpoints.empty()) {
    throw ValidationError("curve", "checkpoints and regret differ in length");
  }
  const std::uint64_t last = checkpoints.back();
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (checkpoints[i] * 10 >= last) {
      xs.push_back(std::log(static_cast<double>(checkpoints[i])));
      ys.push_back(regret[i]);
    }
  }
  if (xs.size() < 3) throw ValidationError("curve", "need at least 3 checkpoints in the final decade");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  if (sxx == 0.0) return 0.0;
  return sxy / sxx;
}

}  // namespace slotbandit
