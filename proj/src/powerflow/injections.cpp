#include <limits>

#include "gridbench/error.hpp"
#include "gridbench/powerflow/types.hpp"

namespace gridbench::powerflow {

using grid::ElementKind;

Injections Injections::nominal(const grid::GridCase& c) {
  Injections inj;
  for (const auto& g : c.generators()) {
    inj.prod_p.push_back(g.p_mw);
    inj.prod_v.push_back(g.v_kv);
  }
  for (const auto& l : c.loads()) {
    inj.load_p.push_back(l.p_mw);
    inj.load_q.push_back(l.q_mvar);
  }
  return inj;
}

void Injections::check(const grid::GridCase& c) const {
  if (prod_p.size() != c.generators().size() || prod_v.size() != c.generators().size()) {
    throw ValidationError("generator injections do not match the case roster");
  }
  if (load_p.size() != c.loads().size() || load_q.size() != c.loads().size()) {
    throw ValidationError("load injections do not match the case roster");
  }
  for (double v : prod_v) {
    if (!(v > 0.0)) throw ValidationError("generator voltage setpoints must be positive");
  }
}

void SolverOptions::check() const {
  if (!(tolerance > 0.0)) throw ValidationError("solver tolerance must be positive");
  if (max_iterations < 1) throw ValidationError("solver max_iterations must be at least 1");
}

void LineFlows::resize(std::size_t n) {
  for (auto* v : {&a_or, &a_ex, &p_or, &p_ex, &q_or, &q_ex, &v_or, &v_ex, &theta_or, &theta_ex}) v->assign(n, 0.0);
}

NodeClassification classify_nodes(const grid::GridCase& c, const grid::Topology& topo, const grid::NodeMap& nodes,
                                  const Injections& inj) {
  const auto n = static_cast<Eigen::Index>(nodes.size());
  NodeClassification out;
  out.type.assign(nodes.size(), NodeType::PQ);
  out.p_spec = Eigen::VectorXd::Zero(n);
  out.q_spec = Eigen::VectorXd::Zero(n);
  out.v_set = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::quiet_NaN());
  const double base = c.base_mva();

  out.slack = grid::element_node(c, topo, nodes, {ElementKind::Generator, c.slack_generator()});
  for (std::size_t g = 0; g < c.generators().size(); ++g) {
    const int k = grid::element_node(c, topo, nodes, {ElementKind::Generator, static_cast<int>(g)});
    if (k < 0) continue;
    const double kv = c.substations()[static_cast<std::size_t>(c.generators()[g].sub)].base_kv;
    out.p_spec[k] += inj.prod_p[g] / base;
    auto& t = out.type[static_cast<std::size_t>(k)];
    if (t == NodeType::PQ) {
      t = NodeType::PV;
      out.v_set[k] = inj.prod_v[g] / kv;
    }
  }
  if (out.slack >= 0) {
    const double kv = c.substations()[static_cast<std::size_t>(c.generators()[static_cast<std::size_t>(c.slack_generator())].sub)].base_kv;
    out.type[static_cast<std::size_t>(out.slack)] = NodeType::Slack;
    out.v_set[out.slack] = inj.prod_v[static_cast<std::size_t>(c.slack_generator())] / kv;
  }
  for (std::size_t l = 0; l < c.loads().size(); ++l) {
    const int k = grid::element_node(c, topo, nodes, {ElementKind::Load, static_cast<int>(l)});
    if (k < 0) continue;
    out.p_spec[k] -= inj.load_p[l] / base;
    out.q_spec[k] -= inj.load_q[l] / base;
  }
  return out;
}

}  // namespace gridbench::powerflow
