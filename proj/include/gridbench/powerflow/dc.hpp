#pragma once

#include <Eigen/Core>

#include "gridbench/grid/case.hpp"
#include "gridbench/grid/topology.hpp"
#include "gridbench/powerflow/types.hpp"

namespace gridbench::powerflow {

struct DcResult {
  grid::NodeMap nodes;
  Eigen::VectorXd theta;  // radians, slack pinned to 0
};

/// Linearized power flow B theta = P with branch susceptance 1 / (x * tap),
/// resistance, charging and shunts ignored. Throws ValidationError on a
/// singular susceptance matrix.
DcResult dc_power_flow(const grid::GridCase& grid_case, const grid::Topology& topo, const Injections& inj);

/// DC active flow of every line in MW, origin to extremity; zero for
/// disconnected lines.
std::vector<double> dc_line_flows(const grid::GridCase& grid_case, const grid::Topology& topo, const DcResult& dc);

}  // namespace gridbench::powerflow
