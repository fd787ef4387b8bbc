#pragma once

#include <cstddef>
#include <vector>

#include "gridbench/grid/ybus.hpp"

namespace gridbench::contingency {

struct ScenarioCluster;

struct DeltaEntry {
  int row = 0;
  int col = 0;
  grid::Complex value;   // scenario minus base (rounded)
  grid::Complex target;  // scenario entry itself
};

/// Sparse difference between a scenario's admittance matrix and its
/// cluster's base matrix, in the base node numbering.
struct DeltaAdmittance {
  std::size_t scenario = 0;
  std::vector<DeltaEntry> entries;  // sorted by (col, row)
};

/// Entries cover the four stamp positions of every line whose status
/// differs from the cluster base, plus shunt diagonals of busbars that lose
/// energization. A rounded base + value can miss the rebuilt entry in the
/// last bit, so each entry also keeps the exact scenario value.
/// Throws ValidationError when the busbar signature differs from the cluster.
DeltaAdmittance build_delta_admittance(const grid::GridCase& grid_case, const ScenarioCluster& cluster,
                                       const grid::Topology& scenario_topo, std::size_t scenario_id = 0);

/// Base matrix with the touched entries replaced by their scenario values,
/// keeping the base sparsity pattern (entries that cancel stay as explicit
/// zeros). Equal to build_ybus(scenario) bit for bit.
grid::ComplexSparse apply_delta(const grid::ComplexSparse& base, const DeltaAdmittance& delta);

}  // namespace gridbench::contingency
