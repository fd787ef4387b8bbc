#pragma once

#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "gridbench/grid/ybus.hpp"
#include "gridbench/powerflow/types.hpp"

namespace gridbench::powerflow {

/// Column (and row) numbering of the Newton system: angle unknowns / active
/// equations for every PV and PQ node, then magnitude unknowns / reactive
/// equations for every PQ node, both in node order.
struct UnknownLayout {
  std::vector<int> angle;      // node -> index or -1
  std::vector<int> magnitude;  // node -> index or -1
  int dim = 0;

  static UnknownLayout from_types(const std::vector<NodeType>& types);
  friend bool operator==(const UnknownLayout&, const UnknownLayout&) = default;
};

Eigen::VectorXcd complex_voltage(const NodeState& state);

/// Residual S_calc - S_spec: real part at every PV/PQ node, imaginary part
/// at every PQ node, laid out per `layout`. S_calc = V * conj(Y V) is the
/// net power leaving each node into the network, so a load-only node with
/// load P has P_spec = -P.
Eigen::VectorXd mismatch(const grid::ComplexSparse& y, const Eigen::VectorXcd& v, const NodeClassification& cls,
                         const UnknownLayout& layout);

/// Convenience form classifying nodes from the topology first.
Eigen::VectorXd mismatch(const grid::GridCase& grid_case, const grid::Topology& topo,
                         const grid::AdmittanceMatrix& y, const NodeState& state, const Injections& inj);

/// Sparsity pattern of the polar Newton Jacobian for a fixed admittance
/// pattern and layout. fill() recomputes values in place in O(nnz(Y)) so the
/// structure can be reused across iterations and across scenarios that share
/// the admittance pattern.
class JacobianPattern {
 public:
  JacobianPattern(const grid::ComplexSparse& y_pattern, const UnknownLayout& layout);

  /// `y` must have exactly the pattern given at construction.
  void fill(const grid::ComplexSparse& y, const Eigen::VectorXcd& v);

  const Eigen::SparseMatrix<double>& matrix() const noexcept { return jac_; }
  const UnknownLayout& layout() const noexcept { return layout_; }

 private:
  struct Slots {
    int pa = -1, pm = -1, qa = -1, qm = -1;
  };
  UnknownLayout layout_;
  Eigen::SparseMatrix<double> jac_;
  std::vector<Slots> slots_;  // one per stored Y entry, in storage order
};

/// Dense-free analytic Jacobian (assembled through JacobianPattern).
Eigen::SparseMatrix<double> jacobian(const grid::ComplexSparse& y, const Eigen::VectorXcd& v,
                                     const UnknownLayout& layout);

/// Starting point for Newton: flat (|v| = 1, theta = 0), DC angles, or an
/// external vector; PV and slack magnitudes always take their setpoints.
NodeState initial_state(const grid::GridCase& grid_case, const grid::Topology& topo, const grid::NodeMap& nodes,
                        const NodeClassification& cls, const Injections& inj, const SolverOptions& opts);

/// Full AC power flow. Throws ConvergenceError on non-convergence or a
/// singular Jacobian, ValidationError on an invalid topology.
///
/// `iterations` counts mismatch evaluations, so a start point that already
/// satisfies the tolerance reports 1.
PowerFlowSolution solve_newton_raphson(const grid::GridCase& grid_case, const grid::Topology& topo,
                                       const Injections& inj, const SolverOptions& opts = {});

/// Generator P/Q after a solve; the slack generator takes the node balance
/// and reactive output is shared evenly among generators on a node.
void realized_production(const grid::GridCase& grid_case, const grid::Topology& topo, const grid::NodeMap& nodes,
                         const grid::ComplexSparse& y, const Eigen::VectorXcd& v, const Injections& inj,
                         std::vector<double>& prod_p, std::vector<double>& prod_q);

}  // namespace gridbench::powerflow
