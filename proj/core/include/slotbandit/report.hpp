#pragma once

// Report rendering and the command implementations behind the CLI.
//
// Exit codes: 0 success, 1 property-check failure, 2 validation error,
// 3 runtime error.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>

#include "slotbandit/bounds.hpp"
#include "slotbandit/documents.hpp"
#include "slotbandit/simulation.hpp"

namespace slotbandit {

enum ExitCode : int { kExitOk = 0, kExitCheckFailed = 1, kExitValidation = 2, kExitRuntime = 3 };

// Six significant digits, '.' decimal separator regardless of locale.
std::string format_number(double value);
// `value` rounded to six significant digits.
double round6(double value);

inline constexpr const char* kRegretCsvHeader =
    "checkpoint,regret_mean,regret_stderr,regret_over_logt_mean,regret_over_logt_stderr";

std::string regret_csv(const AggregateResult& result);

std::string bounds_report(const ProblemInstance& instance, const OptimalStructure& structure,
                          const LowerBoundResult& bounds);

// Final counters, slope estimate and, when the instance admits them, the
// lower bounds the slope is compared against.
std::string simulation_summary(const ProblemInstance& instance, const PolicySpec& policy, const RunConfig& config,
                               const AggregateResult& result);

// Slope compared with a bound: the slope lies within [0.5x, 3x] of it.
struct SlopeCheck {
  std::string bound;
  double value = 0.0;
  double ratio = 0.0;
  bool within = false;
};
inline constexpr double kSlopeWindowLow = 0.5;
inline constexpr double kSlopeWindowHigh = 3.0;
SlopeCheck compare_slope(const std::string& bound, double bound_value, double slope);
// The check whose ratio is nearest 1 on a log scale; null if none has a
// positive ratio.
const SlopeCheck* closest_bound(std::span<const SlopeCheck> checks);

struct Lemma2Summary {
  std::size_t m = 0;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  std::uint64_t checks = 0;
  std::uint64_t passed = 0;
  std::uint64_t failed = 0;
};

// verify_slot_closing on `trials` uniform(0, 1) m x m matrices, every
// non-empty subset of slots each.
Lemma2Summary run_lemma2(std::size_t m, std::uint64_t trials, std::uint64_t seed);
std::string lemma2_report(const Lemma2Summary& summary);

struct CommandOptions {
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> replications;
  std::optional<std::uint64_t> horizon;
  std::optional<std::uint64_t> threads;
};

int cmd_bounds(const std::string& instance_path, const CommandOptions& options, std::ostream& out, std::ostream& err);
int cmd_simulate(const std::string& experiment_path, const CommandOptions& options, std::ostream& out,
                 std::ostream& err);
int cmd_sweep(const std::string& experiment_path, const CommandOptions& options, std::ostream& out,
              std::ostream& err);
int cmd_lemma2(std::uint64_t m, std::uint64_t trials, std::uint64_t seed, const CommandOptions& options,
               std::ostream& out, std::ostream& err);

}  // namespace slotbandit
