#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gridbench/grid/case.hpp"
#include "gridbench/grid/topology.hpp"
#include "gridbench/grid/ybus.hpp"
#include "gridbench/powerflow/types.hpp"
#include "gridbench/scenario/config.hpp"

namespace gridbench::scenario {

struct YbusEntry {
  int row = 0;
  int col = 0;
  grid::Complex value;
};

/// Optional per-sample physics attributes: nodal admittances and scheduled
/// injections (per-unit) over the sample's node map.
struct PhysicsAttributes {
  std::vector<std::pair<int, int>> nodes;  // (substation index, busbar)
  std::vector<YbusEntry> ybus;
  std::vector<grid::Complex> sbus;
  std::vector<int> pv_nodes;
  int slack = -1;
};

struct Sample {
  /// Inputs. prod_p is the realized production after the solve (the slack
  /// entry carries the losses), so re-solving reproduces the outputs.
  powerflow::Injections injections;
  grid::Topology topology;
  powerflow::LineFlows flows;
  std::vector<int> reference_actions;
  std::vector<int> disconnected_lines;
  std::optional<PhysicsAttributes> physics;
};

struct Dataset {
  std::string split;
  std::vector<Sample> samples;
  std::uint64_t env_seed = 0;
  std::uint64_t actor_seed = 0;
  std::string config_hash;
  std::string case_hash;
  std::size_t topology_redraws = 0;  // rejected scenario draws
  std::size_t solver_redraws = 0;    // samples redrawn after a solver failure
  std::size_t loss_redraws = 0;      // samples redrawn for an implausible loss ratio

  std::size_t size() const noexcept { return samples.size(); }
};

struct GenerateOptions {
  std::size_t jobs = 0;
  std::optional<std::size_t> samples;  // overrides the split's sample count
  std::string config_hash;
  std::string case_hash;
};

/// Solver settings used for every stored sample.
powerflow::SolverOptions reference_solver_options();

/// Draws and solves one split. Injections come from the split's env seed,
/// topologies from its actor seed; samples whose solve fails or whose loss
/// ratio leaves cfg.loss_ratio_range are redrawn in index order from the
/// continuing streams.
Dataset generate_dataset(const grid::GridCase& grid_case, const ScenarioConfig& cfg, const std::string& split,
                         const GenerateOptions& opts = {});

/// Solves a stored sample's inputs again with the reference settings.
powerflow::PowerFlowSolution resolve_sample(const grid::GridCase& grid_case, const Sample& sample);

/// Sum of line losses over realized production.
double loss_ratio(const powerflow::Injections& inj, const powerflow::LineFlows& flows);

PhysicsAttributes physics_attributes(const grid::GridCase& grid_case, const grid::Topology& topo,
                                     const powerflow::Injections& inj);

}  // namespace gridbench::scenario
