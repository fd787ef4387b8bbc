#include "gridbench/scenario/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "gridbench/error.hpp"

namespace gridbench::scenario {

using nlohmann::json;

namespace {

constexpr double kProbabilitySlack = 1e-9;

const std::map<std::string, std::size_t> kDeskSamples = {
    {"train", 10000}, {"val", 3000}, {"test", 3000}, {"test_ood", 6000}};

const std::map<std::string, std::pair<const char*, const char*>> kSeedKeys = {
    {"train", {"train_env_seed", "train_actor_seed"}},
    {"val", {"val_env_seed", "val_actor_seed"}},
    {"test", {"test_env_seed", "test_actor_seed"}},
    {"test_ood", {"test_ood_topo_env_seed", "test_ood_topo_actor_seed"}},
};

const std::map<std::string, std::pair<std::uint64_t, std::uint64_t>> kDefaultSeeds = {
    {"train", {1, 5}}, {"val", {2, 6}}, {"test", {3, 7}}, {"test_ood", {4, 8}}};

void check_probabilities(const std::vector<double>& p, const std::string& path) {
  if (p.empty()) throw ValidationError(path + ": probability vector is empty");
  double sum = 0.0;
  for (double x : p) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw ValidationError(path + ": probabilities must be finite and nonnegative");
    sum += x;
  }
  if (std::abs(sum - 1.0) > kProbabilitySlack) {
    std::ostringstream os;
    os << path << ": probabilities sum to " << sum << ", expected 1";
    throw ValidationError(os.str());
  }
}

std::vector<double> read_probabilities(const json& obj, const char* key, const std::string& path) {
  const std::string where = path + "." + key;
  if (!obj.contains(key)) throw ValidationError(where + ": missing");
  const auto& v = obj.at(key);
  if (!v.is_array()) throw ValidationError(where + ": expected an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw ValidationError(where + ": expected an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

double read_number(const json& obj, const char* key, const std::string& path, std::optional<double> fallback = {}) {
  const std::string where = path + "." + key;
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    throw ValidationError(where + ": missing");
  }
  if (!obj.at(key).is_number()) throw ValidationError(where + ": expected a number");
  return obj.at(key).get<double>();
}

long long read_integer(const json& obj, const char* key, const std::string& path, std::optional<long long> fallback = {}) {
  const std::string where = path + "." + key;
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    throw ValidationError(where + ": missing");
  }
  if (!obj.at(key).is_number_integer()) throw ValidationError(where + ": expected an integer");
  return obj.at(key).get<long long>();
}

SamplingParams read_params(const json& obj, const std::string& path) {
  if (!obj.is_object()) throw ValidationError(path + ": expected an object");
  SamplingParams p;
  p.prob_depth = read_probabilities(obj, "prob_depth", path);
  p.prob_type = read_probabilities(obj, "prob_type", path);
  p.prob_do_nothing = read_number(obj, "prob_do_nothing", path);
  p.max_disc = static_cast<int>(read_integer(obj, "max_disc", path));
  p.check(path);
  return p;
}

// {"set_bus": {"substations_id": [[sub, [b1, b2, ...]], ...]}}
ReferenceAction read_action(const json& obj, const std::string& path) {
  const std::string where = path + ".set_bus.substations_id";
  if (!obj.is_object() || !obj.contains("set_bus") || !obj.at("set_bus").is_object() ||
      !obj.at("set_bus").contains("substations_id")) {
    throw ValidationError(where + ": missing");
  }
  const auto& list = obj.at("set_bus").at("substations_id");
  if (!list.is_array() || list.empty()) throw ValidationError(where + ": expected a nonempty array");
  ReferenceAction a;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const auto& pair = list[i];
    const std::string at = where + "[" + std::to_string(i) + "]";
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number_integer() || !pair[1].is_array()) {
      throw ValidationError(at + ": expected [substation_id, [busbar, ...]]");
    }
    grid::SetBus sb;
    sb.substation_id = pair[0].get<int>();
    for (const auto& b : pair[1]) {
      if (!b.is_number_integer()) throw ValidationError(at + ": busbars must be integers");
      sb.assignment.push_back(b.get<int>());
    }
    a.set_bus.push_back(std::move(sb));
  }
  return a;
}

json params_json(const SamplingParams& p) {
  return json{{"prob_depth", p.prob_depth},
              {"prob_type", p.prob_type},
              {"prob_do_nothing", p.prob_do_nothing},
              {"max_disc", p.max_disc}};
}

}  // namespace

void SamplingParams::check(const std::string& path) const {
  check_probabilities(prob_depth, path + ".prob_depth");
  check_probabilities(prob_type, path + ".prob_type");
  if (prob_type.size() != 2) throw ValidationError(path + ".prob_type: expected (bus action, line disconnection)");
  if (!(prob_do_nothing >= 0.0 && prob_do_nothing <= 1.0)) {
    throw ValidationError(path + ".prob_do_nothing: must lie in [0, 1]");
  }
  if (max_disc < 0) throw ValidationError(path + ".max_disc: must be nonnegative");
}

void InjectionParams::check() const {
  if (!(level_min > 0.0 && level_min <= level_max)) throw ValidationError("injections: need 0 < level_min <= level_max");
  if (!(load_sigma >= 0.0)) throw ValidationError("injections.load_sigma: must be nonnegative");
  if (!(load_correlation >= 0.0 && load_correlation <= 1.0)) {
    throw ValidationError("injections.load_correlation: must lie in [0, 1]");
  }
  if (!(loss_factor >= 0.0)) throw ValidationError("injections.loss_factor: must be nonnegative");
  if (!(voltage_jitter >= 0.0 && voltage_jitter < 0.5)) {
    throw ValidationError("injections.voltage_jitter: must lie in [0, 0.5)");
  }
}

const SplitConfig& ScenarioConfig::split(const std::string& name) const {
  for (const auto& s : splits) {
    if (s.name == name) return s;
  }
  throw ValidationError("unknown split '" + name + "'");
}

void ScenarioConfig::check() const {
  reference.check("reference_args");
  injections.check();
  if (max_redraws < 1) throw ValidationError("max_redraws: must be at least 1");
  if (loss_ratio_range) {
    const auto [lo, hi] = *loss_ratio_range;
    if (!(lo >= 0.0 && hi > lo && hi < 1.0)) throw ValidationError("loss_ratio_range: need 0 <= min < max < 1");
  }
  std::set<std::string> seen;
  for (const auto& s : splits) {
    s.params.check(s.name);
    if (s.samples == 0) throw ValidationError(s.name + ".samples: must be positive");
    if (s.region_distance && *s.region_distance < 0) throw ValidationError(s.name + ".region_distance: must be nonnegative");
    if (!seen.insert(s.name).second) throw ValidationError(s.name + ": duplicate split");
  }
  for (std::size_t i = 0; i < reference_actions.size(); ++i) {
    if (reference_actions[i].set_bus.empty()) {
      throw ValidationError("reference_args.topo_actions[" + std::to_string(i) + "]: empty action");
    }
  }
}

ScenarioConfig parse_scenario_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(e.what(), 0, "config");
  }
  if (!doc.is_object()) throw ValidationError("config: top level must be an object");

  ScenarioConfig cfg;
  if (!doc.contains("reference_args")) throw ValidationError("reference_args: missing");
  const auto& ref = doc.at("reference_args");
  cfg.reference = read_params(ref, "reference_args");
  if (ref.contains("topo_actions")) {
    const auto& acts = ref.at("topo_actions");
    if (!acts.is_array()) throw ValidationError("reference_args.topo_actions: expected an array");
    for (std::size_t i = 0; i < acts.size(); ++i) {
      cfg.reference_actions.push_back(read_action(acts[i], "reference_args.topo_actions[" + std::to_string(i) + "]"));
    }
  }

  const json seeds = doc.value("benchmark_seeds", json::object());
  if (!seeds.is_object()) throw ValidationError("benchmark_seeds: expected an object");
  for (const auto& name : kSplitNames) {
    // val shares the train distribution when it has no section of its own.
    const std::string section = (name == "val" && !doc.contains("val")) ? "train" : name;
    if (!doc.contains(section)) throw ValidationError(section + ": missing split section");
    const auto& obj = doc.at(section);
    SplitConfig s;
    s.name = name;
    s.params = read_params(obj, section);
    s.samples = static_cast<std::size_t>(
        read_integer(obj, "samples", section, static_cast<long long>(kDeskSamples.at(name))));
    if (name == "val" && section == "train") s.samples = kDeskSamples.at("val");
    if (obj.contains("region_distance") && !obj.at("region_distance").is_null()) {
      s.region_distance = static_cast<int>(read_integer(obj, "region_distance", section));
    } else if (name == "test_ood" && !obj.contains("region_distance")) {
      s.region_distance = 1;
    }
    const auto [env_key, actor_key] = kSeedKeys.at(name);
    const auto [env_default, actor_default] = kDefaultSeeds.at(name);
    const long long env = read_integer(seeds, env_key, "benchmark_seeds", static_cast<long long>(env_default));
    const long long actor = read_integer(seeds, actor_key, "benchmark_seeds", static_cast<long long>(actor_default));
    if (env < 0 || actor < 0) throw ValidationError("benchmark_seeds: seeds must be nonnegative");
    s.env_seed = static_cast<std::uint64_t>(env);
    s.actor_seed = static_cast<std::uint64_t>(actor);
    cfg.splits.push_back(std::move(s));
  }

  if (doc.contains("injections")) {
    const auto& inj = doc.at("injections");
    if (!inj.is_object()) throw ValidationError("injections: expected an object");
    InjectionParams d;
    cfg.injections.level_min = read_number(inj, "level_min", "injections", d.level_min);
    cfg.injections.level_max = read_number(inj, "level_max", "injections", d.level_max);
    cfg.injections.load_sigma = read_number(inj, "load_sigma", "injections", d.load_sigma);
    cfg.injections.load_correlation = read_number(inj, "load_correlation", "injections", d.load_correlation);
    cfg.injections.loss_factor = read_number(inj, "loss_factor", "injections", d.loss_factor);
    cfg.injections.voltage_jitter = read_number(inj, "voltage_jitter", "injections", d.voltage_jitter);
  }
  if (doc.contains("loss_ratio_range")) {
    const auto& r = doc.at("loss_ratio_range");
    if (r.is_null()) {
      cfg.loss_ratio_range.reset();
    } else if (r.is_array() && r.size() == 2 && r[0].is_number() && r[1].is_number()) {
      cfg.loss_ratio_range = std::pair{r[0].get<double>(), r[1].get<double>()};
    } else {
      throw ValidationError("loss_ratio_range: expected [min, max] or null");
    }
  }
  cfg.max_redraws = static_cast<int>(read_integer(doc, "max_redraws", "config", 100));
  if (doc.contains("store_physics")) {
    if (!doc.at("store_physics").is_boolean()) throw ValidationError("config.store_physics: expected a boolean");
    cfg.store_physics = doc.at("store_physics").get<bool>();
  }
  cfg.check();
  return cfg;
}

ScenarioConfig load_scenario_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return parse_scenario_config(os.str());
}

void check_against_case(const ScenarioConfig& cfg, const grid::GridCase& c) {
  for (std::size_t i = 0; i < cfg.reference_actions.size(); ++i) {
    for (const auto& sb : cfg.reference_actions[i].set_bus) {
      const std::string where = "reference_args.topo_actions[" + std::to_string(i) + "]";
      const auto sub = c.substation_index(sb.substation_id);
      if (!sub) throw ValidationError(where + ": unknown substation " + std::to_string(sb.substation_id));
      if (sb.assignment.size() != c.roster(*sub).size()) {
        throw ValidationError(where + ": substation " + std::to_string(sb.substation_id) + " has " +
                              std::to_string(c.roster(*sub).size()) + " elements, tuple has " +
                              std::to_string(sb.assignment.size()));
      }
      for (int b : sb.assignment) {
        if (b != 1 && b != 2) throw ValidationError(where + ": busbar values must be 1 or 2");
      }
    }
  }
}

std::string to_canonical_json(const ScenarioConfig& cfg) {
  json actions = json::array();
  for (const auto& a : cfg.reference_actions) {
    json subs = json::array();
    for (const auto& sb : a.set_bus) subs.push_back(json::array({sb.substation_id, sb.assignment}));
    actions.push_back(json{{"set_bus", json{{"substations_id", subs}}}});
  }
  json doc;
  doc["reference_args"] = params_json(cfg.reference);
  doc["reference_args"]["topo_actions"] = actions;
  json seeds = json::object();
  for (const auto& s : cfg.splits) {
    json sec = params_json(s.params);
    sec["samples"] = s.samples;
    sec["region_distance"] = s.region_distance ? json(*s.region_distance) : json(nullptr);
    doc[s.name] = sec;
    const auto [env_key, actor_key] = kSeedKeys.at(s.name);
    seeds[env_key] = s.env_seed;
    seeds[actor_key] = s.actor_seed;
  }
  doc["benchmark_seeds"] = seeds;
  const auto& inj = cfg.injections;
  doc["injections"] = json{{"level_min", inj.level_min},           {"level_max", inj.level_max},
                           {"load_sigma", inj.load_sigma},         {"load_correlation", inj.load_correlation},
                           {"loss_factor", inj.loss_factor},       {"voltage_jitter", inj.voltage_jitter}};
  doc["loss_ratio_range"] =
      cfg.loss_ratio_range ? json::array({cfg.loss_ratio_range->first, cfg.loss_ratio_range->second}) : json(nullptr);
  doc["max_redraws"] = cfg.max_redraws;
  doc["store_physics"] = cfg.store_physics;
  return doc.dump(2);
}

}  // namespace gridbench::scenario
