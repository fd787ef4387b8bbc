#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "gridbench/grid/case.hpp"

namespace gridbench::grid {

inline constexpr int kMaxBusbars = 2;

/// Busbar assignment (1 or 2) for every roster entry, laid out as
/// GridCase::elements(), plus a connected flag per line.
struct Topology {
  std::vector<int> busbar;
  std::vector<std::uint8_t> line_status;

  /// Every element on busbar 1, every line connected.
  static Topology reference(const GridCase& grid_case);

  bool connected(std::size_t line) const { return line_status.at(line) != 0; }
  std::size_t disconnected_count() const;

  friend bool operator==(const Topology&, const Topology&) = default;
};

/// Replaces the busbar tuple of one substation (referenced by id).
struct SetBus {
  int substation_id = 0;
  std::vector<int> assignment;
  friend bool operator==(const SetBus&, const SetBus&) = default;
};

struct DisconnectLine {
  int line_id = 0;
  friend bool operator==(const DisconnectLine&, const DisconnectLine&) = default;
};

struct ReconnectLine {
  int line_id = 0;
  friend bool operator==(const ReconnectLine&, const ReconnectLine&) = default;
};

using TopologyAction = std::variant<SetBus, DisconnectLine, ReconnectLine>;

/// Returns a new topology with `action` applied; `base` is untouched.
/// Throws ValidationError for unknown ids, tuple length mismatches and
/// busbar values outside {1, 2}.
Topology apply_topology_action(const GridCase& grid_case, const Topology& base, const TopologyAction& action);

/// Electrical nodes are (substation, busbar) pairs hosting at least one
/// load, generator or connected line end. Nodes are numbered in
/// (substation index, busbar) order.
struct NodeMap {
  std::vector<int> node_of;                   // [2 * sub + busbar - 1] -> node id or -1
  std::vector<std::pair<int, int>> key_of;    // node id -> (substation index, busbar)

  std::size_t size() const noexcept { return key_of.size(); }
  int node(int sub, int busbar) const { return node_of.at(static_cast<std::size_t>(2 * sub + busbar - 1)); }
};

NodeMap compute_node_map(const GridCase& grid_case, const Topology& topo);

/// Node hosting an element endpoint under `topo`, or -1 when the endpoint
/// belongs to a disconnected line.
int element_node(const GridCase& grid_case, const Topology& topo, const NodeMap& nodes, ElementRef ref);

/// Node hosting the shunts of `sub` (busbar 1), or -1 when that busbar is
/// not energized.
int shunt_node(const NodeMap& nodes, int sub);

struct TopologyVerdict {
  bool valid = false;
  std::string reason;
  explicit operator bool() const noexcept { return valid; }
};

/// Accepts iff dimensions match, busbars are in {1, 2}, the energized node
/// graph is connected and the slack generator is energized.
TopologyVerdict validate_topology(const GridCase& grid_case, const Topology& topo);

}  // namespace gridbench::grid
