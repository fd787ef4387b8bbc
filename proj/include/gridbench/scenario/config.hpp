#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gridbench/grid/topology.hpp"

namespace gridbench::scenario {

/// Action sampling parameters of one stage. prob_depth[d] is the
/// probability of applying d + 1 actions; prob_type is (bus action, line
/// disconnection) per drawn action.
struct SamplingParams {
  std::vector<double> prob_depth;
  std::vector<double> prob_type;
  double prob_do_nothing = 0.0;
  int max_disc = 0;

  /// Throws ValidationError naming `path` and the offending key.
  void check(const std::string& path) const;
};

/// One entry of the reference action list; usually a single set_bus.
struct ReferenceAction {
  std::vector<grid::SetBus> set_bus;
};

/// Load-scaling model for the injection draw.
struct InjectionParams {
  double level_min = 0.75;        // uniform system load level
  double level_max = 1.0;
  double load_sigma = 0.05;       // log-normal spread per load
  double load_correlation = 0.5;  // share of variance from a common factor
  double loss_factor = 0.03;      // generation = load * (1 + loss_factor) before slack balancing
  double voltage_jitter = 0.0;    // relative uniform jitter on generator setpoints

  void check() const;
};

struct SplitConfig {
  std::string name;
  SamplingParams params;
  std::uint64_t env_seed = 0;
  std::uint64_t actor_seed = 0;
  std::size_t samples = 0;
  /// Maximum substation hop distance between disconnected lines; unset means
  /// no region constraint.
  std::optional<int> region_distance;
};

struct ScenarioConfig {
  std::vector<ReferenceAction> reference_actions;
  SamplingParams reference;
  std::vector<SplitConfig> splits;  // train, val, test, test_ood
  InjectionParams injections;
  /// Solved samples whose losses / production falls outside this window are
  /// redrawn; unset keeps every converged sample.
  std::optional<std::pair<double, double>> loss_ratio_range = std::pair{0.005, 0.04};
  int max_redraws = 100;
  bool store_physics = false;

  const SplitConfig& split(const std::string& name) const;
  void check() const;
};

inline const std::vector<std::string> kSplitNames = {"train", "val", "test", "test_ood"};

/// Parses the JSON configuration. Throws ValidationError with the key path
/// of the first invalid field.
ScenarioConfig parse_scenario_config(std::string_view json_text);
ScenarioConfig load_scenario_config(const std::filesystem::path& path);

/// Checks the reference actions against a case (ids, tuple lengths).
void check_against_case(const ScenarioConfig& cfg, const grid::GridCase& grid_case);

/// Canonical JSON rendering (sorted keys, every default spelled out); the
/// config hash is taken over this text.
std::string to_canonical_json(const ScenarioConfig& cfg);

}  // namespace gridbench::scenario
