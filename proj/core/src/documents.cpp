#include "slotbandit/documents.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

#include "slotbandit/errors.hpp"

namespace slotbandit {

using nlohmann::json;

namespace {

void expect_object(const json& j, const std::string& field) {
  if (!j.is_object()) throw ValidationError(field, "must be an object");
}

void reject_unknown(const json& j, const std::string& field, std::initializer_list<const char*> allowed) {
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ValidationError(field.empty() ? key : field + "." + key, "unknown field");
  }
}

const json& require(const json& j, const std::string& field, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw ValidationError(field.empty() ? key : field + "." + key, "missing field");
  return *it;
}

std::string join(const std::string& field, const std::string& key) { return field.empty() ? key : field + "." + key; }

double get_double(const json& j, const std::string& field) {
  if (!j.is_number()) throw ValidationError(field, "must be a number");
  return j.get<double>();
}

std::uint64_t get_uint(const json& j, const std::string& field) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer()) {
    if (j.get<std::int64_t>() < 0) throw ValidationError(field, "must be non-negative");
    return static_cast<std::uint64_t>(j.get<std::int64_t>());
  }
  if (j.is_number_float()) {
    const double v = j.get<double>();
    if (v >= 0 && v == std::floor(v) && v < 1.8e19) return static_cast<std::uint64_t>(v);
  }
  throw ValidationError(field, "must be a non-negative integer");
}

std::vector<double> get_vector(const json& j, const std::string& field) {
  if (!j.is_array()) throw ValidationError(field, "must be an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(get_double(j[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

// Re-labels constructor errors with the document path of the instance.
template <typename F>
ProblemInstance build_instance(const std::string& field, F&& make) {
  try {
    return make();
  } catch (const ValidationError& e) {
    throw ValidationError(join(field, e.field()), e.message());
  }
}

ProblemInstance instance_from_json(const json& j, const std::string& field) {
  expect_object(j, field.empty() ? "instance" : field);
  const json& kind = require(j, field, "kind");
  if (!kind.is_string()) throw ValidationError(join(field, "kind"), "must be a string");
  const auto k = kind.get<std::string>();
  if (k == "factorized") {
    reject_unknown(j, field, {"kind", "exam_probs", "arm_means"});
    auto p = get_vector(require(j, field, "exam_probs"), join(field, "exam_probs"));
    auto mu = get_vector(require(j, field, "arm_means"), join(field, "arm_means"));
    return build_instance(field, [&] { return ProblemInstance::factorized(std::move(p), std::move(mu)); });
  }
  if (k == "per_slot") {
    reject_unknown(j, field, {"kind", "slot_means"});
    const std::string sf = join(field, "slot_means");
    const json& rows = require(j, field, "slot_means");
    if (!rows.is_array() || rows.empty()) throw ValidationError(sf, "must be a non-empty array of rows");
    std::vector<std::vector<double>> data;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      data.push_back(get_vector(rows[r], sf + "[" + std::to_string(r) + "]"));
      if (data.back().size() != data.front().size()) throw ValidationError(sf, "rows differ in length");
    }
    Matrix theta(data.size(), data.front().size());
    for (std::size_t r = 0; r < data.size(); ++r) {
      for (std::size_t c = 0; c < data[r].size(); ++c) theta(r, c) = data[r][c];
    }
    return build_instance(field, [&] { return ProblemInstance::per_slot(std::move(theta)); });
  }
  throw ValidationError(join(field, "kind"), "must be \"factorized\" or \"per_slot\"");
}

json instance_to_json(const ProblemInstance& inst) {
  json j;
  j["kind"] = std::string(to_string(inst.kind()));
  if (inst.kind() == InstanceKind::kFactorized) {
    j["exam_probs"] = inst.exam_probs();
    j["arm_means"] = inst.arm_means();
  } else {
    json rows = json::array();
    for (Arm a = 0; a < inst.num_arms(); ++a) {
      json row = json::array();
      for (Slot k = 0; k < inst.num_slots(); ++k) row.push_back(inst.slot_mean(k, a));
      rows.push_back(std::move(row));
    }
    j["slot_means"] = std::move(rows);
  }
  return j;
}

PolicySpec policy_from_json(const json& j, const std::string& field) {
  expect_object(j, field);
  reject_unknown(j, field, {"name", "params"});
  PolicySpec spec;
  const json& name = require(j, field, "name");
  if (!name.is_string() || !is_policy_name(name.get<std::string>())) {
    throw ValidationError(join(field, "name"),
                          "must be one of algorithm1, perslot, ranked_ucb, oracle, uniform");
  }
  spec.name = name.get<std::string>();
  if (auto it = j.find("params"); it != j.end()) {
    const std::string pf = join(field, "params");
    expect_object(*it, pf);
    reject_unknown(*it, pf, {"delta", "index_tolerance", "estimate_slot_order", "exploration_test"});
    if (auto d = it->find("delta"); d != it->end()) spec.params.delta = get_double(*d, join(pf, "delta"));
    if (auto d = it->find("index_tolerance"); d != it->end()) {
      spec.params.index_tolerance = get_double(*d, join(pf, "index_tolerance"));
    }
    if (auto d = it->find("estimate_slot_order"); d != it->end()) {
      if (!d->is_boolean()) throw ValidationError(join(pf, "estimate_slot_order"), "must be a boolean");
      spec.params.estimate_slot_order = d->get<bool>();
    }
    if (auto d = it->find("exploration_test"); d != it->end()) {
      const std::string v = d->is_string() ? d->get<std::string>() : "";
      if (v == "slot_mean") {
        spec.params.exploration_test = ExplorationTest::kSlotMean;
      } else if (v == "list_value") {
        spec.params.exploration_test = ExplorationTest::kListValue;
      } else {
        throw ValidationError(join(pf, "exploration_test"), "must be \"slot_mean\" or \"list_value\"");
      }
    }
  }
  return spec;
}

json policy_to_json(const PolicySpec& spec) {
  json params;
  if (spec.params.delta) params["delta"] = *spec.params.delta;
  params["index_tolerance"] = spec.params.index_tolerance;
  params["estimate_slot_order"] = spec.params.estimate_slot_order;
  params["exploration_test"] = std::string(to_string(spec.params.exploration_test));
  return json{{"name", spec.name}, {"params", std::move(params)}};
}

// Checks parameters that depend on the instance (delta range and so on).
void check_policy(const PolicySpec& spec, const ProblemInstance& instance, const std::string& field) {
  try {
    make_policy(spec.name, instance, spec.params);
  } catch (const ValidationError& e) {
    const std::string sub = e.field().rfind("policy.", 0) == 0 ? e.field().substr(7) : e.field();
    throw ValidationError(join(field, sub), e.message());
  }
}

}  // namespace

std::string_view to_string(ExplorationTest test) noexcept {
  return test == ExplorationTest::kSlotMean ? "slot_mean" : "list_value";
}

RunConfig ExperimentDocument::config_for(const PolicySpec& spec) const {
  RunConfig c;
  c.horizon = run.horizon;
  c.checkpoints = run.checkpoints.empty() ? default_checkpoints(run.horizon, run.checkpoints_per_decade) : run.checkpoints;
  c.replications = run.replications;
  c.master_seed = run.master_seed;
  c.threads = run.threads;
  c.policy = spec.name;
  c.params = spec.params;
  return c;
}

ProblemInstance parse_instance(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ValidationError("instance", "not valid JSON");
  return instance_from_json(j, "");
}

ExperimentDocument parse_experiment(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ValidationError("experiment", "not valid JSON");
  expect_object(j, "experiment");
  reject_unknown(j, "", {"instance", "policy", "policies", "run", "output"});

  ExperimentDocument doc{instance_from_json(require(j, "", "instance"), "instance"), {}, {}, {}, {}};
  if (auto it = j.find("policy"); it != j.end()) {
    doc.policy = policy_from_json(*it, "policy");
    check_policy(*doc.policy, doc.instance, "policy");
  }
  if (auto it = j.find("policies"); it != j.end()) {
    if (!it->is_array() || it->empty()) throw ValidationError("policies", "must be a non-empty array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string f = "policies[" + std::to_string(i) + "]";
      doc.policies.push_back(policy_from_json((*it)[i], f));
      check_policy(doc.policies.back(), doc.instance, f);
    }
  }
  if (!doc.policy && doc.policies.empty()) throw ValidationError("policy", "missing field");

  const json& run = require(j, "", "run");
  expect_object(run, "run");
  reject_unknown(run, "run", {"horizon", "checkpoints", "checkpoints_per_decade", "replications", "master_seed", "threads"});
  doc.run.horizon = get_uint(require(run, "run", "horizon"), "run.horizon");
  if (auto it = run.find("checkpoints"); it != run.end()) {
    if (!it->is_array()) throw ValidationError("run.checkpoints", "must be an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      doc.run.checkpoints.push_back(get_uint((*it)[i], "run.checkpoints[" + std::to_string(i) + "]"));
    }
  }
  if (auto it = run.find("checkpoints_per_decade"); it != run.end()) {
    const auto v = get_uint(*it, "run.checkpoints_per_decade");
    if (v < 1 || v > 100) throw ValidationError("run.checkpoints_per_decade", "must lie in [1, 100]");
    doc.run.checkpoints_per_decade = static_cast<int>(v);
  }
  if (auto it = run.find("replications"); it != run.end()) doc.run.replications = get_uint(*it, "run.replications");
  if (auto it = run.find("master_seed"); it != run.end()) doc.run.master_seed = get_uint(*it, "run.master_seed");
  if (auto it = run.find("threads"); it != run.end()) doc.run.threads = get_uint(*it, "run.threads");

  if (auto it = j.find("output"); it != j.end()) {
    expect_object(*it, "output");
    reject_unknown(*it, "output", {"dir", "csv", "summary"});
    for (const char* key : {"dir", "csv", "summary"}) {
      auto f = it->find(key);
      if (f == it->end()) continue;
      if (!f->is_string() || f->get<std::string>().empty()) {
        throw ValidationError(std::string("output.") + key, "must be a non-empty string");
      }
      std::string& dst = std::string(key) == "dir" ? doc.output.dir
                         : std::string(key) == "csv" ? doc.output.csv
                                                     : doc.output.summary;
      dst = f->get<std::string>();
    }
  }

  validate(doc.config_for(doc.policy ? *doc.policy : doc.policies.front()));
  return doc;
}

std::string serialize_instance(const ProblemInstance& instance) { return instance_to_json(instance).dump(2) + "\n"; }

std::string serialize_experiment(const ExperimentDocument& doc) {
  json j;
  j["instance"] = instance_to_json(doc.instance);
  if (doc.policy) j["policy"] = policy_to_json(*doc.policy);
  if (!doc.policies.empty()) {
    json arr = json::array();
    for (const auto& p : doc.policies) arr.push_back(policy_to_json(p));
    j["policies"] = std::move(arr);
  }
  json run;
  run["horizon"] = doc.run.horizon;
  if (!doc.run.checkpoints.empty()) run["checkpoints"] = doc.run.checkpoints;
  run["checkpoints_per_decade"] = doc.run.checkpoints_per_decade;
  run["replications"] = doc.run.replications;
  run["master_seed"] = doc.run.master_seed;
  run["threads"] = doc.run.threads;
  j["run"] = std::move(run);
  j["output"] = json{{"dir", doc.output.dir}, {"csv", doc.output.csv}, {"summary", doc.output.summary}};
  return j.dump(2) + "\n";
}

std::string read_text_file(const std::string& path, const std::string& field) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError(field, "cannot read file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace slotbandit
