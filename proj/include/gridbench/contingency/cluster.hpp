#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gridbench/grid/topology.hpp"
#include "gridbench/grid/ybus.hpp"

namespace gridbench::contingency {

/// Scenarios sharing one busbar signature. Members differ only in line
/// statuses; the base topology is the signature with every line connected,
/// so every member's node set is a subset of the base node set.
struct ScenarioCluster {
  std::vector<int> signature;
  std::vector<std::size_t> members;  // indices into the clustered list, ascending
  grid::Topology base_topology;
  grid::AdmittanceMatrix base;
};

/// Partitions topologies by exact busbar signature. Clusters are ordered by
/// the index of their first member.
std::vector<ScenarioCluster> cluster_scenarios(const grid::GridCase& grid_case,
                                               std::span<const grid::Topology> scenarios);

}  // namespace gridbench::contingency
