#include "gridbench/contingency/delta.hpp"

#include <set>

#include "gridbench/contingency/cluster.hpp"
#include "gridbench/error.hpp"

namespace gridbench::contingency {

namespace {

grid::Complex base_value(const grid::ComplexSparse& y, int row, int col) {
  for (grid::ComplexSparse::InnerIterator it(y, col); it; ++it) {
    if (it.row() == row) return it.value();
  }
  return {};
}

}  // namespace

DeltaAdmittance build_delta_admittance(const grid::GridCase& c, const ScenarioCluster& cluster,
                                       const grid::Topology& topo, std::size_t scenario_id) {
  if (topo.busbar != cluster.signature) {
    throw ValidationError("scenario busbar signature does not match the cluster");
  }
  const auto& nodes = cluster.base.nodes;
  std::set<std::pair<int, int>> positions;  // (col, row)
  for (std::size_t l = 0; l < c.line_count(); ++l) {
    if (topo.line_status.at(l) == cluster.base_topology.line_status[l]) continue;
    const auto li = static_cast<int>(l);
    const int f = grid::element_node(c, cluster.base_topology, nodes, {grid::ElementKind::LineOr, li});
    const int t = grid::element_node(c, cluster.base_topology, nodes, {grid::ElementKind::LineEx, li});
    positions.insert({f, f});
    positions.insert({t, f});
    positions.insert({f, t});
    positions.insert({t, t});
  }
  if (!c.shunts().empty() && !positions.empty()) {
    const grid::NodeMap own = grid::compute_node_map(c, topo);
    for (const auto& sh : c.shunts()) {
      const int k = nodes.node(sh.sub, 1);
      if (k >= 0 && own.node(sh.sub, 1) < 0) positions.insert({k, k});
    }
  }

  DeltaAdmittance delta;
  delta.scenario = scenario_id;
  delta.entries.reserve(positions.size());
  for (const auto& [col, row] : positions) {
    const grid::Complex target = grid::ybus_entry(c, topo, nodes, row, col);
    const grid::Complex base = base_value(cluster.base.y, row, col);
    delta.entries.push_back({row, col, target - base, target});
  }
  return delta;
}

grid::ComplexSparse apply_delta(const grid::ComplexSparse& base, const DeltaAdmittance& delta) {
  grid::ComplexSparse y = base;
  for (const auto& e : delta.entries) y.coeffRef(e.row, e.col) = e.target;
  return y;
}

}  // namespace gridbench::contingency
