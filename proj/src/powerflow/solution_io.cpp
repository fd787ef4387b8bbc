#include "gridbench/powerflow/solution_io.hpp"

#include <iomanip>
#include <ostream>

namespace gridbench::powerflow {

namespace {

const char* type_name(NodeType t) {
  switch (t) {
    case NodeType::PQ: return "PQ";
    case NodeType::PV: return "PV";
    case NodeType::Slack: return "slack";
    case NodeType::Dead: return "dead";
  }
  return "?";
}

}  // namespace

void write_line_table(std::ostream& out, const grid::GridCase& c, const LineFlows& f) {
  out << "id,a_or,a_ex,p_or,p_ex,q_or,q_ex,v_or,v_ex,theta_or,theta_ex\n" << std::setprecision(17);
  for (std::size_t l = 0; l < f.size(); ++l) {
    out << c.lines()[l].id << ',' << f.a_or[l] << ',' << f.a_ex[l] << ',' << f.p_or[l] << ',' << f.p_ex[l] << ','
        << f.q_or[l] << ',' << f.q_ex[l] << ',' << f.v_or[l] << ',' << f.v_ex[l] << ',' << f.theta_or[l] << ','
        << f.theta_ex[l] << '\n';
  }
}

void write_node_table(std::ostream& out, const grid::GridCase& c, const PowerFlowSolution& s) {
  out << "substation,busbar,type,vm_pu,va_rad,v_kv\n" << std::setprecision(17);
  for (std::size_t k = 0; k < s.nodes.size(); ++k) {
    const auto [sub, bb] = s.nodes.key_of[k];
    const auto kk = static_cast<Eigen::Index>(k);
    const double kv = c.substations()[static_cast<std::size_t>(sub)].base_kv;
    out << c.substations()[static_cast<std::size_t>(sub)].id << ',' << bb << ',' << type_name(s.state.type[k]) << ','
        << s.state.vm[kk] << ',' << s.state.va[kk] << ',' << s.state.vm[kk] * kv << '\n';
  }
}

}  // namespace gridbench::powerflow
