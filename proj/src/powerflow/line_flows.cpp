#include "gridbench/powerflow/line_flows.hpp"

#include <cmath>

#include "gridbench/grid/ybus.hpp"

namespace gridbench::powerflow {

LineFlows compute_line_flows(const grid::GridCase& c, const grid::Topology& topo, const grid::NodeMap& nodes,
                             const NodeState& state, double phase_factor) {
  LineFlows out;
  out.resize(c.line_count());
  const double base = c.base_mva();
  for (std::size_t l = 0; l < c.line_count(); ++l) {
    if (!topo.connected(l)) continue;
    const auto& line = c.lines()[l];
    const auto li = static_cast<int>(l);
    const int f = grid::element_node(c, topo, nodes, {grid::ElementKind::LineOr, li});
    const int t = grid::element_node(c, topo, nodes, {grid::ElementKind::LineEx, li});
    const grid::Complex vf = std::polar(state.vm[f], state.va[f]);
    const grid::Complex vt = std::polar(state.vm[t], state.va[t]);
    const grid::LineStamp s = grid::line_stamp(line);
    const grid::Complex s_or = vf * std::conj(s.ff * vf + s.ft * vt) * base;
    const grid::Complex s_ex = vt * std::conj(s.tf * vf + s.tt * vt) * base;
    const double kv_or = c.substations()[static_cast<std::size_t>(line.sub_or)].base_kv;
    const double kv_ex = c.substations()[static_cast<std::size_t>(line.sub_ex)].base_kv;

    out.p_or[l] = s_or.real();
    out.q_or[l] = s_or.imag();
    out.p_ex[l] = s_ex.real();
    out.q_ex[l] = s_ex.imag();
    out.v_or[l] = state.vm[f] * kv_or;
    out.v_ex[l] = state.vm[t] * kv_ex;
    out.theta_or[l] = state.va[f];
    out.theta_ex[l] = state.va[t];
    // MVA / kV gives kA.
    out.a_or[l] = out.v_or[l] > 0.0 ? std::abs(s_or) / (phase_factor * out.v_or[l]) * 1e3 : 0.0;
    out.a_ex[l] = out.v_ex[l] > 0.0 ? std::abs(s_ex) / (phase_factor * out.v_ex[l]) * 1e3 : 0.0;
  }
  return out;
}

}  // namespace gridbench::powerflow
