#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gridbench/grid/topology.hpp"
#include "gridbench/powerflow/types.hpp"

namespace gridbench::contingency {

enum class LinearSolver {
  Pcg,     // CGNR with Jacobi preconditioning, direct fallback per block
  Direct,  // sparse LU per block; one symbolic analysis per shared pattern
};

/// Warm-start vector over a scenario's own node map.
struct WarmStart {
  Eigen::VectorXd va;
  Eigen::VectorXd vm;  // may be empty
};

struct BatchOptions {
  std::size_t jobs = 0;  // 0 = hardware concurrency
  LinearSolver linear_solver = LinearSolver::Direct;
  /// Inexact Newton forcing term: the relative PCG tolerance at an outer
  /// iterate with mismatch norm m is clamp(factor * m, min, max).
  double inner_tolerance_factor = 1e-2;
  double inner_tolerance_min = 1e-12;
  double inner_tolerance_max = 1e-1;
  int pcg_max_iterations = 500;
  /// Required when SolverOptions::initializer is External.
  std::function<WarmStart(std::size_t scenario, const grid::NodeMap& nodes)> initializer;
};

enum class ScenarioStatus { Converged, NotConverged, InvalidTopology, Failed };

const char* to_string(ScenarioStatus status);

struct ScenarioOutcome {
  ScenarioStatus status = ScenarioStatus::Failed;
  std::optional<powerflow::PowerFlowSolution> solution;
  std::string message;
  double final_mismatch = 0.0;
  int pcg_iterations = 0;
  int direct_solves = 0;
};

/// Wall-clock seconds per phase.
struct BatchTiming {
  double setup = 0.0;        // validation, clustering, deltas, warm starts
  double assembly = 0.0;     // mismatch + Jacobian refill
  double linear_solve = 0.0;
  double post_processing = 0.0;
  double total = 0.0;
};

struct BatchResult {
  std::vector<ScenarioOutcome> outcomes;  // input order
  BatchTiming timing;
  std::size_t cluster_count = 0;

  std::size_t converged_count() const;
};

/// Solves many scenarios of one grid: clusters by busbar signature, shares
/// a base admittance matrix per cluster with per-scenario deltas, and runs
/// Newton on all members together with block linear solves. Invalid or
/// non-converging scenarios are reported in their slot without aborting the
/// batch.
BatchResult batch_solve(const grid::GridCase& grid_case, std::span<const grid::Topology> topologies,
                        std::span<const powerflow::Injections> injections, const powerflow::SolverOptions& opts,
                        const BatchOptions& batch_opts = {});

/// The reference topology with each line disconnected in turn (one
/// topology per line, in line order).
std::vector<grid::Topology> n1_topologies(const grid::GridCase& grid_case, const grid::Topology& base);

}  // namespace gridbench::contingency
