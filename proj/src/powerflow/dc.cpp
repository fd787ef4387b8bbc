#include "gridbench/powerflow/dc.hpp"

#include <Eigen/SparseCholesky>

#include "gridbench/error.hpp"

namespace gridbench::powerflow {

namespace {

double branch_susceptance(const grid::Line& line) {
  if (line.x == 0.0) throw ValidationError("line " + std::to_string(line.id) + " has zero reactance (DC model)");
  return 1.0 / (line.x * line.tap);
}

std::pair<int, int> endpoints(const grid::GridCase& c, const grid::Topology& topo, const grid::NodeMap& nodes,
                              std::size_t l) {
  const auto li = static_cast<int>(l);
  return {grid::element_node(c, topo, nodes, {grid::ElementKind::LineOr, li}),
          grid::element_node(c, topo, nodes, {grid::ElementKind::LineEx, li})};
}

}  // namespace

DcResult dc_power_flow(const grid::GridCase& c, const grid::Topology& topo, const Injections& inj) {
  inj.check(c);
  DcResult out;
  out.nodes = grid::compute_node_map(c, topo);
  const NodeClassification cls = classify_nodes(c, topo, out.nodes, inj);
  const auto n = static_cast<Eigen::Index>(out.nodes.size());
  out.theta = Eigen::VectorXd::Zero(n);
  if (cls.slack < 0) throw ValidationError("slack generator is not energized");

  // Reduced numbering without the slack node.
  std::vector<int> red(out.nodes.size(), -1);
  int dim = 0;
  for (Eigen::Index k = 0; k < n; ++k) {
    if (k != cls.slack) red[static_cast<std::size_t>(k)] = dim++;
  }
  if (dim == 0) return out;

  std::vector<Eigen::Triplet<double>> triplets;
  for (std::size_t l = 0; l < c.line_count(); ++l) {
    if (!topo.connected(l)) continue;
    const double b = branch_susceptance(c.lines()[l]);
    const auto [f, t] = endpoints(c, topo, out.nodes, l);
    const int rf = red[static_cast<std::size_t>(f)], rt = red[static_cast<std::size_t>(t)];
    if (rf >= 0) triplets.emplace_back(rf, rf, b);
    if (rt >= 0) triplets.emplace_back(rt, rt, b);
    if (rf >= 0 && rt >= 0) {
      triplets.emplace_back(rf, rt, -b);
      triplets.emplace_back(rt, rf, -b);
    }
  }
  Eigen::SparseMatrix<double> bmat(dim, dim);
  bmat.setFromTriplets(triplets.begin(), triplets.end());
  Eigen::VectorXd p(dim);
  for (Eigen::Index k = 0; k < n; ++k) {
    if (red[static_cast<std::size_t>(k)] >= 0) p[red[static_cast<std::size_t>(k)]] = cls.p_spec[k];
  }
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(bmat);
  if (ldlt.info() != Eigen::Success) throw ValidationError("singular DC susceptance matrix (islanded topology?)");
  const Eigen::VectorXd theta = ldlt.solve(p);
  if (ldlt.info() != Eigen::Success || !theta.allFinite()) {
    throw ValidationError("singular DC susceptance matrix (islanded topology?)");
  }
  for (Eigen::Index k = 0; k < n; ++k) {
    if (red[static_cast<std::size_t>(k)] >= 0) out.theta[k] = theta[red[static_cast<std::size_t>(k)]];
  }
  return out;
}

std::vector<double> dc_line_flows(const grid::GridCase& c, const grid::Topology& topo, const DcResult& dc) {
  std::vector<double> flows(c.line_count(), 0.0);
  for (std::size_t l = 0; l < c.line_count(); ++l) {
    if (!topo.connected(l)) continue;
    const auto [f, t] = endpoints(c, topo, dc.nodes, l);
    flows[l] = branch_susceptance(c.lines()[l]) * (dc.theta[f] - dc.theta[t]) * c.base_mva();
  }
  return flows;
}

}  // namespace gridbench::powerflow
