#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "gridbench/grid/case.hpp"
#include "gridbench/grid/topology.hpp"
#include "gridbench/scenario/config.hpp"
#include "gridbench/scenario/rng.hpp"

namespace gridbench::scenario {

struct Scenario {
  std::vector<int> reference_actions;   // indices into cfg.reference_actions
  std::vector<int> disconnected_lines;  // line indices, ascending
  grid::Topology topology;
  std::size_t redraws = 0;              // rejected draws before this one
};

/// Substation hop distances on the all-lines-connected graph, and the
/// derived line-to-line distance (closest pair of endpoints).
class LineDistance {
 public:
  explicit LineDistance(const grid::GridCase& grid_case);
  int substations(int a, int b) const { return hops_[static_cast<std::size_t>(a) * n_ + static_cast<std::size_t>(b)]; }
  int lines(int l1, int l2) const;

 private:
  const grid::GridCase* case_;
  std::size_t n_;
  std::vector<int> hops_;  // -1 when unreachable
};

/// Two-stage draw for one split: the reference stage picks set_bus actions,
/// the split stage disconnects lines, and illegal or invalid draws are
/// redrawn up to cfg.max_redraws times.
class ScenarioSampler {
 public:
  ScenarioSampler(const grid::GridCase& grid_case, const ScenarioConfig& cfg, const std::string& split);

  /// Throws ValidationError when the redraw cap is exhausted (unsatisfiable
  /// configuration).
  Scenario sample(Rng& actor);

  const SplitConfig& split() const noexcept { return *split_; }

 private:
  struct Draw {
    std::vector<int> actions;
    std::vector<int> lines;
  };
  // False when the draw breaks a stage rule (max_disc, region).
  bool draw_stage(Rng& rng, const SamplingParams& params, std::size_t action_count, bool region, Draw& out);
  bool draw_lines(Rng& rng, std::size_t count, bool region, std::vector<int>& out);

  const grid::GridCase* case_;
  const ScenarioConfig* cfg_;
  const SplitConfig* split_;
  LineDistance distance_;
  grid::Topology reference_;
};

}  // namespace gridbench::scenario
