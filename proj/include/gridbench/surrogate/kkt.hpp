#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "gridbench/grid/case.hpp"
#include "gridbench/grid/topology.hpp"
#include "gridbench/metrics/prediction.hpp"
#include "gridbench/powerflow/types.hpp"

namespace gridbench::surrogate {

/// Nodal active-power conservation A y = b over the flattened prediction
/// y = [p_or (all lines) | p_ex (all lines)] in MW. One row per energized
/// node with at least one connected line end; b is production minus load
/// at that node.
struct LinearConstraintSystem {
  Eigen::SparseMatrix<double, Eigen::RowMajor> a;
  Eigen::VectorXd b;
  std::vector<int> row_node;  // node id (sample node map) per row

  Eigen::Index dimension() const noexcept { return a.cols(); }
};

/// Throws ValidationError for an invalid topology, mismatched injection
/// sizes, or a node with nonzero injection and no connected line (the
/// system would be infeasible).
LinearConstraintSystem build_conservation_constraints(const grid::GridCase& grid_case, const grid::Topology& topo,
                                                      const powerflow::Injections& inj);

Eigen::VectorXd flatten_active_power(const powerflow::LineFlows& flows);
/// Writes y back into p_or / p_ex; other quantities untouched.
void unflatten_active_power(const Eigen::VectorXd& y, powerflow::LineFlows& flows);

/// Euclidean projection onto {y : A y = b}. Throws ValidationError on a
/// dimension mismatch or when A A^T is not positive definite.
Eigen::VectorXd kkt_project(const Eigen::VectorXd& y, const LinearConstraintSystem& sys);

/// Projection with the factorization of A A^T cached per topology. Safe
/// to call from several threads.
class KktProjector {
 public:
  explicit KktProjector(const grid::GridCase& grid_case) : case_(&grid_case) {}

  Eigen::VectorXd project(const Eigen::VectorXd& y, const grid::Topology& topo, const powerflow::Injections& inj) const;
  powerflow::LineFlows project(const powerflow::LineFlows& pred, const grid::Topology& topo,
                               const powerflow::Injections& inj) const;

  std::size_t cached_topologies() const;

 private:
  struct Factor;
  std::shared_ptr<const Factor> factor_for(const grid::Topology& topo, const LinearConstraintSystem& sys) const;

  const grid::GridCase* case_;
  mutable std::mutex mutex_;
  mutable std::map<std::string, std::shared_ptr<const Factor>> cache_;
};

}  // namespace gridbench::surrogate
