#include "gridbench/grid/topology.hpp"

#include <algorithm>
#include <numeric>

#include "gridbench/error.hpp"

namespace gridbench::grid {

Topology Topology::reference(const GridCase& c) {
  Topology t;
  t.busbar.assign(c.element_count(), 1);
  t.line_status.assign(c.line_count(), 1);
  return t;
}

std::size_t Topology::disconnected_count() const {
  return static_cast<std::size_t>(std::count(line_status.begin(), line_status.end(), std::uint8_t{0}));
}

namespace {

int require_line(const GridCase& c, int id) {
  const auto idx = c.line_index(id);
  if (!idx) throw ValidationError("unknown line id " + std::to_string(id));
  return *idx;
}

}  // namespace

Topology apply_topology_action(const GridCase& c, const Topology& base, const TopologyAction& action) {
  Topology out = base;
  std::visit(
      [&](const auto& a) {
        using A = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<A, SetBus>) {
          const auto sub = c.substation_index(a.substation_id);
          if (!sub) throw ValidationError("unknown substation id " + std::to_string(a.substation_id));
          const auto& roster = c.roster(*sub);
          if (a.assignment.size() != roster.size()) {
            throw ValidationError("set_bus on substation " + std::to_string(a.substation_id) + " has " +
                                  std::to_string(a.assignment.size()) + " entries but the substation has " +
                                  std::to_string(roster.size()) + " elements");
          }
          const std::size_t offset = c.roster_offset(*sub);
          for (std::size_t k = 0; k < roster.size(); ++k) {
            const int bb = a.assignment[k];
            if (bb < 1 || bb > kMaxBusbars) {
              throw ValidationError("busbar value " + std::to_string(bb) + " outside {1, 2}");
            }
            out.busbar.at(offset + k) = bb;
          }
        } else if constexpr (std::is_same_v<A, DisconnectLine>) {
          out.line_status.at(static_cast<std::size_t>(require_line(c, a.line_id))) = 0;
        } else {
          out.line_status.at(static_cast<std::size_t>(require_line(c, a.line_id))) = 1;
        }
      },
      action);
  return out;
}

NodeMap compute_node_map(const GridCase& c, const Topology& topo) {
  const std::size_t n_sub = c.substation_count();
  std::vector<std::uint8_t> hosted(2 * n_sub, 0);
  const auto& elements = c.elements();
  for (std::size_t pos = 0; pos < elements.size(); ++pos) {
    const auto& ref = elements[pos];
    if ((ref.kind == ElementKind::LineOr || ref.kind == ElementKind::LineEx) &&
        !topo.connected(static_cast<std::size_t>(ref.index))) {
      continue;
    }
    const int bb = topo.busbar.at(pos);
    if (bb < 1 || bb > kMaxBusbars) continue;
    hosted[static_cast<std::size_t>(2 * c.substation_of(ref) + bb - 1)] = 1;
  }
  NodeMap m;
  m.node_of.assign(2 * n_sub, -1);
  for (std::size_t s = 0; s < n_sub; ++s) {
    for (int bb = 1; bb <= kMaxBusbars; ++bb) {
      const std::size_t slot = 2 * s + static_cast<std::size_t>(bb) - 1;
      if (hosted[slot]) {
        m.node_of[slot] = static_cast<int>(m.key_of.size());
        m.key_of.emplace_back(static_cast<int>(s), bb);
      }
    }
  }
  return m;
}

int element_node(const GridCase& c, const Topology& topo, const NodeMap& nodes, ElementRef ref) {
  if ((ref.kind == ElementKind::LineOr || ref.kind == ElementKind::LineEx) &&
      !topo.connected(static_cast<std::size_t>(ref.index))) {
    return -1;
  }
  return nodes.node(c.substation_of(ref), topo.busbar.at(c.position(ref)));
}

int shunt_node(const NodeMap& nodes, int sub) { return nodes.node(sub, 1); }

TopologyVerdict validate_topology(const GridCase& c, const Topology& topo) {
  if (topo.busbar.size() != c.element_count()) return {false, "busbar vector has the wrong length"};
  if (topo.line_status.size() != c.line_count()) return {false, "line status vector has the wrong length"};
  for (int bb : topo.busbar) {
    if (bb < 1 || bb > kMaxBusbars) return {false, "busbar value outside {1, 2}"};
  }
  const NodeMap nodes = compute_node_map(c, topo);
  const int slack_node =
      element_node(c, topo, nodes, {ElementKind::Generator, c.slack_generator()});
  if (slack_node < 0) return {false, "slack generator is not energized"};

  std::vector<int> parent(nodes.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };
  for (std::size_t l = 0; l < c.line_count(); ++l) {
    if (!topo.connected(l)) continue;
    const int a = find(element_node(c, topo, nodes, {ElementKind::LineOr, static_cast<int>(l)}));
    const int b = find(element_node(c, topo, nodes, {ElementKind::LineEx, static_cast<int>(l)}));
    if (a != b) parent[static_cast<std::size_t>(a)] = b;
  }
  const int root = find(slack_node);
  for (std::size_t n = 0; n < nodes.size(); ++n) {
    if (find(static_cast<int>(n)) != root) {
      const auto [sub, bb] = nodes.key_of[n];
      return {false, "islanded node at substation " + std::to_string(c.substations()[static_cast<std::size_t>(sub)].id) +
                         " busbar " + std::to_string(bb)};
    }
  }
  return {true, {}};
}

}  // namespace gridbench::grid
