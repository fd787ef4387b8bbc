#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "gridbench/contingency/cluster.hpp"
#include "gridbench/contingency/delta.hpp"
#include "gridbench/powerflow/newton.hpp"

namespace gridbench::contingency {

/// Per-member Newton data in the cluster's base node numbering. Nodes of
/// the base that carry nothing in this member are typed Dead.
struct MemberSystem {
  std::size_t scenario = 0;
  DeltaAdmittance delta;
  grid::ComplexSparse y;  // base pattern, member values
  powerflow::NodeClassification cls;
  powerflow::UnknownLayout layout;
  std::optional<powerflow::JacobianPattern> jacobian;
  /// Members with equal group share one Jacobian sparsity pattern (0 is the
  /// base prototype), so one symbolic factorization serves all of them.
  int pattern_group = 0;
};

/// Everything needed to run Newton on all members of one cluster. The
/// Jacobian structure of the base topology is built once and copied to
/// every member that shares its unknown layout.
class ClusterWorkspace {
 public:
  /// `topologies` / `injections` are indexed by scenario id (the values in
  /// cluster.members).
  ClusterWorkspace(const grid::GridCase& grid_case, const ScenarioCluster& cluster,
                   std::span<const grid::Topology> topologies, std::span<const powerflow::Injections> injections);

  const ScenarioCluster& cluster() const noexcept { return *cluster_; }
  std::vector<MemberSystem>& members() noexcept { return members_; }
  const std::vector<MemberSystem>& members() const noexcept { return members_; }
  /// Members whose Jacobian structure was copied from the base prototype.
  std::size_t shared_pattern_count() const noexcept { return shared_patterns_; }

 private:
  const ScenarioCluster* cluster_;
  std::vector<MemberSystem> members_;
  std::size_t shared_patterns_ = 0;
};

/// Block-diagonal stack of per-member Newton systems J dx = -F.
struct BlockSystem {
  std::vector<std::size_t> members;  // workspace member position per block
  std::vector<Eigen::SparseMatrix<double>> blocks;
  std::vector<Eigen::VectorXd> rhs;
  std::vector<double> mismatch_norm;  // infinity norm of F per block

  std::size_t block_count() const noexcept { return blocks.size(); }
  /// Start offset of each block in the stacked vectors (size blocks + 1).
  std::vector<Eigen::Index> offsets() const;
  Eigen::SparseMatrix<double> stacked_matrix() const;
  Eigen::VectorXd stacked_rhs() const;
  Eigen::VectorXd block_of(const Eigen::VectorXd& stacked, std::size_t block) const;
};

/// Assembles the Newton systems of the listed members (all members when
/// `active` is empty) at `states` (indexed by member position). Block
/// dimension is 2 * (PQ count) + (PV count) of that member.
BlockSystem assemble_block_system(ClusterWorkspace& workspace, std::span<const powerflow::NodeState> states,
                                  std::span<const std::size_t> active = {}, std::size_t jobs = 1);

}  // namespace gridbench::contingency
