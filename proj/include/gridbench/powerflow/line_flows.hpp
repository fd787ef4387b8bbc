#pragma once

#include "gridbench/grid/case.hpp"
#include "gridbench/grid/topology.hpp"
#include "gridbench/powerflow/types.hpp"

namespace gridbench::powerflow {

/// Ohm-law branch flows at both ends from a node state. Each end's power
/// includes its own half of the line charging; disconnected lines get exact
/// zeros for every quantity (voltages and angles included).
LineFlows compute_line_flows(const grid::GridCase& grid_case, const grid::Topology& topo,
                             const grid::NodeMap& nodes, const NodeState& state,
                             double phase_factor = kThreePhaseFactor);

}  // namespace gridbench::powerflow
