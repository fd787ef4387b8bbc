#include "gridbench/contingency/block_system.hpp"

#include <numeric>

#include "gridbench/error.hpp"
#include "gridbench/parallel.hpp"

namespace gridbench::contingency {

using powerflow::NodeType;

ClusterWorkspace::ClusterWorkspace(const grid::GridCase& c, const ScenarioCluster& cluster,
                                   std::span<const grid::Topology> topologies,
                                   std::span<const powerflow::Injections> injections)
    : cluster_(&cluster) {
  const auto& nodes = cluster.base.nodes;
  std::optional<powerflow::JacobianPattern> prototype;
  powerflow::UnknownLayout base_layout;
  {
    // Base layout: types are independent of injection values.
    const auto& any_inj = injections[cluster.members.front()];
    const auto cls = powerflow::classify_nodes(c, cluster.base_topology, nodes, any_inj);
    base_layout = powerflow::UnknownLayout::from_types(cls.type);
    prototype.emplace(cluster.base.y, base_layout);
  }

  int own_groups = 0;
  members_.reserve(cluster.members.size());
  for (std::size_t id : cluster.members) {
    const auto& topo = topologies[id];
    MemberSystem m;
    m.scenario = id;
    m.delta = build_delta_admittance(c, cluster, topo, id);
    m.y = apply_delta(cluster.base.y, m.delta);
    m.cls = powerflow::classify_nodes(c, topo, nodes, injections[id]);
    const grid::NodeMap own = grid::compute_node_map(c, topo);
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      const auto [sub, bb] = nodes.key_of[k];
      if (own.node(sub, bb) < 0) m.cls.type[k] = NodeType::Dead;
    }
    m.layout = powerflow::UnknownLayout::from_types(m.cls.type);
    if (m.layout == base_layout) {
      m.jacobian = *prototype;
      ++shared_patterns_;
    } else {
      m.jacobian.emplace(m.y, m.layout);
      m.pattern_group = ++own_groups;
    }
    members_.push_back(std::move(m));
  }
}

std::vector<Eigen::Index> BlockSystem::offsets() const {
  std::vector<Eigen::Index> off(blocks.size() + 1, 0);
  for (std::size_t i = 0; i < blocks.size(); ++i) off[i + 1] = off[i] + blocks[i].rows();
  return off;
}

Eigen::SparseMatrix<double> BlockSystem::stacked_matrix() const {
  const auto off = offsets();
  std::vector<Eigen::Triplet<double>> triplets;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    for (Eigen::Index col = 0; col < blocks[i].outerSize(); ++col) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(blocks[i], col); it; ++it) {
        triplets.emplace_back(off[i] + it.row(), off[i] + it.col(), it.value());
      }
    }
  }
  Eigen::SparseMatrix<double> out(off.back(), off.back());
  out.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

Eigen::VectorXd BlockSystem::stacked_rhs() const {
  const auto off = offsets();
  Eigen::VectorXd out(off.back());
  for (std::size_t i = 0; i < rhs.size(); ++i) out.segment(off[i], rhs[i].size()) = rhs[i];
  return out;
}

Eigen::VectorXd BlockSystem::block_of(const Eigen::VectorXd& stacked, std::size_t block) const {
  const auto off = offsets();
  if (stacked.size() != off.back()) throw ValidationError("stacked vector has the wrong dimension");
  return stacked.segment(off[block], off[block + 1] - off[block]);
}

BlockSystem assemble_block_system(ClusterWorkspace& ws, std::span<const powerflow::NodeState> states,
                                  std::span<const std::size_t> active, std::size_t jobs) {
  auto& members = ws.members();
  if (states.size() != members.size()) throw ValidationError("one node state per cluster member is required");
  std::vector<std::size_t> list;
  if (active.empty()) {
    list.resize(members.size());
    std::iota(list.begin(), list.end(), std::size_t{0});
  } else {
    list.assign(active.begin(), active.end());
  }

  BlockSystem sys;
  sys.members = list;
  sys.blocks.resize(list.size());
  sys.rhs.resize(list.size());
  sys.mismatch_norm.resize(list.size());
  parallel_for(list.size(), jobs, [&](std::size_t b) {
    auto& m = members.at(list[b]);
    const auto& state = states[list[b]];
    if (state.vm.size() != m.y.rows() || state.va.size() != m.y.rows()) {
      throw ValidationError("node state dimension does not match the cluster");
    }
    const Eigen::VectorXcd v = powerflow::complex_voltage(state);
    const Eigen::VectorXd f = powerflow::mismatch(m.y, v, m.cls, m.layout);
    m.jacobian->fill(m.y, v);
    sys.blocks[b] = m.jacobian->matrix();
    sys.rhs[b] = -f;
    sys.mismatch_norm[b] = f.size() > 0 ? f.lpNorm<Eigen::Infinity>() : 0.0;
  });
  return sys;
}

}  // namespace gridbench::contingency
