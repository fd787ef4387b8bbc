#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Core>

#include "gridbench/grid/case.hpp"
#include "gridbench/grid/topology.hpp"

namespace gridbench::powerflow {

/// Physical-unit injections: MW, kV, MW, MVAr.
struct Injections {
  std::vector<double> prod_p;
  std::vector<double> prod_v;
  std::vector<double> load_p;
  std::vector<double> load_q;

  static Injections nominal(const grid::GridCase& grid_case);
  /// Throws ValidationError on dimension mismatch or non-positive setpoints.
  void check(const grid::GridCase& grid_case) const;

  friend bool operator==(const Injections&, const Injections&) = default;
};

/// `Dead` marks a node kept in a shared node numbering that carries no
/// element in the current scenario; it has no unknowns and zero voltage.
enum class NodeType { PQ, PV, Slack, Dead };

/// Per-node voltage in per-unit magnitude and radians.
struct NodeState {
  Eigen::VectorXd vm;
  Eigen::VectorXd va;
  std::vector<NodeType> type;
};

/// Node types and scheduled injections (per-unit) derived from a topology.
struct NodeClassification {
  std::vector<NodeType> type;
  int slack = -1;
  Eigen::VectorXd p_spec;  // generation minus load, slack entry unused
  Eigen::VectorXd q_spec;  // minus reactive load, only used at PQ nodes
  Eigen::VectorXd v_set;   // voltage setpoint at PV / slack nodes, NaN elsewhere
};

NodeClassification classify_nodes(const grid::GridCase& grid_case, const grid::Topology& topo,
                                  const grid::NodeMap& nodes, const Injections& inj);

enum class Initializer { Flat, DcWarmStart, External };

struct SolverOptions {
  double tolerance = 1e-8;  // infinity norm of the mismatch, per-unit power
  int max_iterations = 30;
  Initializer initializer = Initializer::Flat;
  /// Used with Initializer::External: angles (radians) and optionally
  /// magnitudes (per-unit) over the scenario's node map. PV and slack
  /// magnitudes are always reset to their setpoints.
  Eigen::VectorXd external_va;
  Eigen::VectorXd external_vm;

  void check() const;
};

/// Per-line outputs at both ends: A, MW, MVAr, kV, radians.
struct LineFlows {
  std::vector<double> a_or, a_ex;
  std::vector<double> p_or, p_ex;
  std::vector<double> q_or, q_ex;
  std::vector<double> v_or, v_ex;
  std::vector<double> theta_or, theta_ex;

  void resize(std::size_t n);
  std::size_t size() const noexcept { return a_or.size(); }
};

struct PowerFlowSolution {
  grid::NodeMap nodes;
  NodeState state;
  LineFlows lines;
  /// Generator outputs after the solve; the slack entry absorbs losses.
  std::vector<double> prod_p;
  std::vector<double> prod_q;
  int iterations = 0;
  double mismatch_norm = 0.0;
};

/// Current magnitude constant: a = |S| / (factor * V_ll).
inline const double kThreePhaseFactor = std::sqrt(3.0);

}  // namespace gridbench::powerflow
