#include "slotbandit/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "slotbandit/errors.hpp"
#include "slotbandit/random.hpp"
#include "slotbandit/slot_closing.hpp"

namespace slotbandit {

using nlohmann::json;

std::string format_number(double value) {
  if (value == 0.0) return "0";  // also folds -0
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 6);
  return std::string(buf, r.ptr);
}

double round6(double value) {
  if (!std::isfinite(value)) return value;
  const std::string s = format_number(value);
  double out = 0.0;
  std::from_chars(s.data(), s.data() + s.size(), out);
  return out;
}

std::string regret_csv(const AggregateResult& result) {
  std::string out = kRegretCsvHeader;
  out += '\n';
  for (std::size_t i = 0; i < result.checkpoints.size(); ++i) {
    out += std::to_string(result.checkpoints[i]);
    for (double v : {result.regret_mean[i], result.regret_stderr[i], result.ratio_mean[i], result.ratio_stderr[i]}) {
      out += ',';
      out += format_number(v);
    }
    out += '\n';
  }
  return out;
}

namespace {

json one_based(const std::vector<Arm>& arms) {
  json a = json::array();
  for (Arm x : arms) a.push_back(x + 1);
  return a;
}

json list_json(const ArmList& l) { return one_based(l.arms()); }

// nlohmann's float printer is not always shortest, so a value already
// rounded to six digits can come out as 0.5462089999999999. Re-emit every
// non-integer number token through format_number.
std::string dump_report(const json& j) {
  const std::string raw = j.dump(2);
  std::string out;
  out.reserve(raw.size());
  bool in_string = false;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const char c = raw[i];
    if (in_string) {
      out += c;
      if (c == '\\') {
        out += raw[++i];
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
      out += c;
      continue;
    }
    if (c == '-' || (c >= '0' && c <= '9')) {
      std::size_t end = i;
      while (end < raw.size() && std::strchr("+-0123456789.eE", raw[end]) != nullptr) ++end;
      const std::string_view token(raw.data() + i, end - i);
      if (token.find_first_of(".eE") == std::string_view::npos) {
        out += token;
      } else {
        double v = 0.0;
        std::from_chars(token.data(), token.data() + token.size(), v);
        out += format_number(v);
      }
      i = end - 1;
      continue;
    }
    out += c;
  }
  return out + "\n";
}

json optional_number(const std::optional<double>& v) { return v ? json(round6(*v)) : json(nullptr); }

json structure_json(const OptimalStructure& s) {
  json lists = json::array();
  for (const auto& l : s.optimal_lists) lists.push_back(list_json(l));
  json winners = json::array();
  for (const auto& w : s.slot_winners) winners.push_back(one_based(w));
  return json{{"optimal_value", round6(s.optimal_value)},
              {"optimal_lists", std::move(lists)},
              {"relevant_arms", one_based(s.relevant_arms)},
              {"irrelevant_arms", one_based(s.irrelevant_arms)},
              {"slot_winners", std::move(winners)}};
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw RunError("cannot write '" + path.string() + "'");
  f << content;
  if (!f) throw RunError("failed writing '" + path.string() + "'");
}

// Runs `body`, mapping exceptions to exit codes.
template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const ValidationError& e) {
    err << "validation error: " << e.field() << ": " << e.message() << '\n';
    return kExitValidation;
  } catch (const InvalidListError& e) {
    err << "validation error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const IllPosedError& e) {
    err << "validation error: ill-posed instance: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

ExperimentDocument load_experiment(const std::string& path, const CommandOptions& options) {
  ExperimentDocument doc = parse_experiment(read_text_file(path, "experiment"));
  if (options.seed) doc.run.master_seed = *options.seed;
  if (options.replications) doc.run.replications = *options.replications;
  if (options.threads) doc.run.threads = *options.threads;
  if (options.horizon) {
    doc.run.horizon = *options.horizon;
    // Explicit checkpoints past the new horizon are dropped; the horizon
    // itself is always reported.
    auto& cps = doc.run.checkpoints;
    if (!cps.empty()) {
      std::erase_if(cps, [&](std::uint64_t c) { return c > doc.run.horizon; });
      if (cps.empty() || cps.back() != doc.run.horizon) cps.push_back(doc.run.horizon);
    }
  }
  if (options.out_dir) doc.output.dir = *options.out_dir;
  return doc;
}

std::string stem_of(const std::string& file) { return std::filesystem::path(file).stem().string(); }

}  // namespace

SlopeCheck compare_slope(const std::string& bound, double bound_value, double slope) {
  SlopeCheck c;
  c.bound = bound;
  c.value = bound_value;
  c.ratio = bound_value > 0.0 ? slope / bound_value : 0.0;
  c.within = bound_value > 0.0 && slope >= kSlopeWindowLow * bound_value && slope <= kSlopeWindowHigh * bound_value;
  return c;
}

const SlopeCheck* closest_bound(std::span<const SlopeCheck> checks) {
  const SlopeCheck* best = nullptr;
  for (const auto& c : checks) {
    if (c.ratio <= 0.0) continue;
    if (best == nullptr || std::abs(std::log(c.ratio)) < std::abs(std::log(best->ratio))) best = &c;
  }
  return best;
}

std::string bounds_report(const ProblemInstance& instance, const OptimalStructure& structure,
                          const LowerBoundResult& bounds) {
  json j;
  j["kind"] = std::string(to_string(instance.kind()));
  j["num_arms"] = instance.num_arms();
  j["num_slots"] = instance.num_slots();
  j["lp_bound"] = round6(bounds.lp_bound);
  j["theorem1"] = round6(bounds.theorem1);
  j["theorem2"] = optional_number(bounds.theorem2);
  if (bounds.theorem3) {
    j["theorem3_as_stated"] = round6(bounds.theorem3->as_stated);
    j["theorem3_theorem1_consistent"] = round6(bounds.theorem3->theorem1_consistent);
  } else {
    j["theorem3_as_stated"] = nullptr;
    j["theorem3_theorem1_consistent"] = nullptr;
  }
  json play = json::array();
  if (!bounds.per_slot_play_bounds.empty()) {
    for (Arm a : structure.irrelevant_arms) {
      for (Slot k = 0; k < instance.num_slots(); ++k) {
        play.push_back(json{{"slot", k + 1}, {"arm", a + 1}, {"bound", round6(bounds.per_slot_play_bounds(k, a))}});
      }
    }
  }
  j["per_slot_play_bounds"] = std::move(play);
  j["optimal_structure"] = structure_json(structure);

  json duals = json::array();
  // Rows follow (relevant, irrelevant) pairs in ascending order.
  std::size_t r = 0;
  for (Arm i : structure.relevant_arms) {
    for (Arm jj : structure.irrelevant_arms) {
      if (r < bounds.lp.duals.size()) {
        duals.push_back(json{{"relevant", i + 1}, {"irrelevant", jj + 1}, {"lambda", round6(bounds.lp.duals[r])}});
      }
      ++r;
    }
  }
  j["lp"] = json{{"objective", round6(bounds.lp.objective)},
                 {"duals", std::move(duals)},
                 {"row_slackness", round6(bounds.lp.row_slackness)},
                 {"column_slackness", round6(bounds.lp.column_slackness)},
                 {"primal_infeasibility", round6(bounds.lp.primal_infeasibility)},
                 {"dual_infeasibility", round6(bounds.lp.dual_infeasibility)}};
  return dump_report(j);
}

std::string simulation_summary(const ProblemInstance& instance, const PolicySpec& policy, const RunConfig& config,
                               const AggregateResult& result) {
  json j;
  j["policy"] = policy.name;
  j["horizon"] = config.horizon;
  j["replications"] = config.replications;
  j["master_seed"] = config.master_seed;
  const std::size_t last = result.checkpoints.size() - 1;
  j["final"] = json{{"checkpoint", result.checkpoints[last]},
                    {"regret_mean", round6(result.regret_mean[last])},
                    {"regret_stderr", round6(result.regret_stderr[last])},
                    {"regret_over_logt_mean", round6(result.ratio_mean[last])},
                    {"regret_over_logt_stderr", round6(result.ratio_stderr[last])}};
  j["slope_estimate"] = result.slope_defined ? json(round6(result.slope)) : json(nullptr);

  double init = 0.0;
  double explore = 0.0;
  for (const auto& run : result.runs) {
    init += static_cast<double>(run.init_steps);
    explore += static_cast<double>(run.exploration_steps);
  }
  const double reps = static_cast<double>(std::max<std::size_t>(result.runs.size(), 1));
  j["init_steps_mean"] = round6(init / reps);
  j["exploration_steps_mean"] = round6(explore / reps);

  const auto lists = enumerate_lists(instance);
  json plays = json::array();
  for (std::size_t i = 0; i < lists.size(); ++i) {
    plays.push_back(json{{"list", list_json(lists[i])}, {"plays", round6(result.list_plays_mean[i])}});
  }
  j["list_plays_mean"] = std::move(plays);
  json slot_arm = json::array();
  for (Slot k = 0; k < instance.num_slots(); ++k) {
    json row = json::array();
    for (Arm a = 0; a < instance.num_arms(); ++a) {
      row.push_back(round6(result.slot_arm_plays_mean[k * instance.num_arms() + a]));
    }
    slot_arm.push_back(std::move(row));
  }
  j["slot_arm_plays_mean"] = std::move(slot_arm);
  json obs = json::array();
  for (double v : result.arm_observations_mean) obs.push_back(round6(v));
  j["arm_observations_mean"] = std::move(obs);

  // Bounds are optional context; an ill-posed instance simply omits them.
  try {
    const auto b = compute_lower_bounds(instance);
    json bj{{"lp_bound", round6(b.lp_bound)}, {"theorem1", round6(b.theorem1)}};
    std::vector<SlopeCheck> checks;
    if (b.theorem2) {
      bj["theorem2"] = round6(*b.theorem2);
      checks.push_back(compare_slope("theorem2", *b.theorem2, result.slope));
    }
    if (b.theorem3) {
      bj["theorem3_as_stated"] = round6(b.theorem3->as_stated);
      bj["theorem3_theorem1_consistent"] = round6(b.theorem3->theorem1_consistent);
      checks.push_back(compare_slope("theorem3_theorem1_consistent", b.theorem3->theorem1_consistent, result.slope));
      checks.push_back(compare_slope("theorem3_as_stated", b.theorem3->as_stated, result.slope));
    } else {
      checks.push_back(compare_slope("theorem1", b.theorem1, result.slope));
    }
    j["bounds"] = std::move(bj);
    if (result.slope_defined) {
      json cj = json::array();
      for (const auto& c : checks) {
        cj.push_back(json{{"bound", c.bound}, {"value", round6(c.value)}, {"slope_ratio", round6(c.ratio)},
                          {"within_0.5x_3x", c.within}});
      }
      j["slope_vs_bounds"] = std::move(cj);
      if (const SlopeCheck* best = closest_bound(checks)) j["closest_bound"] = best->bound;
    }
  } catch (const std::exception&) {
    j["bounds"] = nullptr;
  }
  return dump_report(j);
}

Lemma2Summary run_lemma2(std::size_t m, std::uint64_t trials, std::uint64_t seed) {
  if (m < 1 || m > kMaxClosingSlots) throw ValidationError("m", "must lie in [1, 4]");
  Lemma2Summary s;
  s.m = m;
  s.trials = trials;
  s.seed = seed;
  Rng rng(seed);
  for (std::uint64_t trial = 0; trial < trials; ++trial) {
    Matrix r(m, m);
    for (std::size_t a = 0; a < m; ++a) {
      for (std::size_t b = 0; b < m; ++b) r(a, b) = rng.uniform();
    }
    for (unsigned mask = 1; mask < (1u << m); ++mask) {
      std::vector<std::size_t> subset;
      for (std::size_t k = 0; k < m; ++k) {
        if (mask & (1u << k)) subset.push_back(k);
      }
      const auto rep = verify_slot_closing(r, subset);
      ++s.checks;
      (rep.equal ? s.passed : s.failed) += 1;
    }
  }
  return s;
}

std::string lemma2_report(const Lemma2Summary& s) {
  json j{{"m", s.m},           {"trials", s.trials}, {"seed", s.seed},
         {"checks", s.checks}, {"passed", s.passed}, {"failed", s.failed}};
  return dump_report(j);
}

int cmd_bounds(const std::string& instance_path, const CommandOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto instance = parse_instance(read_text_file(instance_path, "instance"));
    const auto structure = optimal_structure(instance);
    const auto bounds = compute_lower_bounds(instance);
    const std::string report = bounds_report(instance, structure, bounds);
    out << report;
    const std::filesystem::path dir = options.out_dir.value_or("out");
    write_file(dir / (stem_of(instance_path) + "_bounds.json"), report);
    return int{kExitOk};
  });
}

int cmd_simulate(const std::string& experiment_path, const CommandOptions& options, std::ostream& out,
                 std::ostream& err) {
  return guarded(err, [&] {
    const auto doc = load_experiment(experiment_path, options);
    if (!doc.policy) throw ValidationError("policy", "missing field (simulate needs a single policy)");
    const RunConfig config = doc.config_for(*doc.policy);
    validate(config);
    const auto result = run_replicated(doc.instance, config);
    const std::filesystem::path dir = doc.output.dir;
    write_file(dir / doc.output.csv, regret_csv(result));
    write_file(dir / doc.output.summary, simulation_summary(doc.instance, *doc.policy, config, result));
    out << "wrote " << (dir / doc.output.csv).string() << " and " << (dir / doc.output.summary).string() << '\n';
    return int{kExitOk};
  });
}

int cmd_sweep(const std::string& experiment_path, const CommandOptions& options, std::ostream& out,
              std::ostream& err) {
  return guarded(err, [&] {
    const auto doc = load_experiment(experiment_path, options);
    std::vector<PolicySpec> specs = doc.policies;
    if (specs.empty()) {
      for (auto name : kPolicyNames) specs.push_back(PolicySpec{std::string(name), doc.policy->params});
    }
    const std::filesystem::path dir = doc.output.dir;
    for (const auto& spec : specs) {
      const RunConfig config = doc.config_for(spec);
      validate(config);
      const auto result = run_replicated(doc.instance, config);
      write_file(dir / (spec.name + ".csv"), regret_csv(result));
      write_file(dir / (spec.name + "_summary.json"), simulation_summary(doc.instance, spec, config, result));
      out << "wrote " << (dir / (spec.name + ".csv")).string() << '\n';
    }
    return int{kExitOk};
  });
}

int cmd_lemma2(std::uint64_t m, std::uint64_t trials, std::uint64_t seed, const CommandOptions& options,
               std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto summary = run_lemma2(m, trials, seed);
    const std::string report = lemma2_report(summary);
    out << report;
    if (options.out_dir) write_file(std::filesystem::path(*options.out_dir) / "lemma2.json", report);
    return summary.failed == 0 ? int{kExitOk} : int{kExitCheckFailed};
  });
}

}  // namespace slotbandit
