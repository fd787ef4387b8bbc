#include "gridbench/grid/ybus.hpp"

#include <map>
#include <vector>

#include "gridbench/error.hpp"

namespace gridbench::grid {

LineStamp line_stamp(const Line& line) {
  if (line.r == 0.0 && line.x == 0.0) {
    throw ValidationError("line " + std::to_string(line.id) + " has zero impedance");
  }
  const Complex ys = 1.0 / Complex(line.r, line.x);
  const Complex charging(0.0, line.b / 2.0);
  const double t = line.tap;
  return {(ys + charging) / (t * t), -ys / t, -ys / t, ys + charging};
}

namespace {

// Endpoint nodes of line l under `topo`, numbered by `nodes`.
std::pair<int, int> endpoints(const GridCase& c, const Topology& topo, const NodeMap& nodes, std::size_t l) {
  const auto& line = c.lines()[l];
  const int f = nodes.node(line.sub_or, topo.busbar[c.position({ElementKind::LineOr, static_cast<int>(l)})]);
  const int t = nodes.node(line.sub_ex, topo.busbar[c.position({ElementKind::LineEx, static_cast<int>(l)})]);
  return {f, t};
}

}  // namespace

AdmittanceMatrix build_ybus(const GridCase& c, const Topology& topo) {
  AdmittanceMatrix out;
  out.nodes = compute_node_map(c, topo);
  const auto n = static_cast<Eigen::Index>(out.nodes.size());

  // Keyed (col, row) so iteration order is column-major.
  std::map<std::pair<int, int>, Complex> acc;
  for (std::size_t l = 0; l < c.line_count(); ++l) {
    if (!topo.connected(l)) continue;
    const LineStamp s = line_stamp(c.lines()[l]);
    const auto [f, t] = endpoints(c, topo, out.nodes, l);
    acc[{f, f}] += s.ff;
    acc[{t, f}] += s.ft;
    acc[{f, t}] += s.tf;
    acc[{t, t}] += s.tt;
  }
  for (const auto& sh : c.shunts()) {
    const int k = shunt_node(out.nodes, sh.sub);
    if (k < 0) continue;
    acc[{k, k}] += Complex(sh.g_mw, sh.b_mvar) / c.base_mva();
  }

  std::vector<Eigen::Triplet<Complex>> triplets;
  triplets.reserve(acc.size());
  for (const auto& [key, value] : acc) triplets.emplace_back(key.second, key.first, value);
  out.y.resize(n, n);
  out.y.setFromTriplets(triplets.begin(), triplets.end());
  out.y.makeCompressed();
  return out;
}

Complex ybus_entry(const GridCase& c, const Topology& topo, const NodeMap& nodes, int k, int m) {
  const NodeMap own = compute_node_map(c, topo);
  Complex value{};
  for (std::size_t l = 0; l < c.line_count(); ++l) {
    if (!topo.connected(l)) continue;
    const auto [f, t] = endpoints(c, topo, nodes, l);
    if (k == m) {
      if (f == k || t == k) {
        const LineStamp s = line_stamp(c.lines()[l]);
        value += f == k ? s.ff : s.tt;
      }
    } else if ((f == k && t == m) || (f == m && t == k)) {
      const LineStamp s = line_stamp(c.lines()[l]);
      value += f == k ? s.ft : s.tf;
    }
  }
  if (k == m) {
    const auto [sub, bb] = nodes.key_of.at(static_cast<std::size_t>(k));
    if (bb == 1 && own.node(sub, 1) >= 0) {
      for (const auto& sh : c.shunts()) {
        if (sh.sub == sub) value += Complex(sh.g_mw, sh.b_mvar) / c.base_mva();
      }
    }
  }
  return value;
}

}  // namespace gridbench::grid
