#pragma once

#include <iosfwd>

#include "gridbench/grid/case.hpp"
#include "gridbench/powerflow/types.hpp"

namespace gridbench::powerflow {

/// One row per line: id,a_or,a_ex,p_or,p_ex,q_or,q_ex,v_or,v_ex,theta_or,theta_ex
/// (A, MW, MVAr, kV, rad). Values use round-trip precision.
void write_line_table(std::ostream& out, const grid::GridCase& grid_case, const LineFlows& flows);

/// One row per node: substation,busbar,type,vm_pu,va_rad,v_kv.
void write_node_table(std::ostream& out, const grid::GridCase& grid_case, const PowerFlowSolution& solution);

}  // namespace gridbench::powerflow
