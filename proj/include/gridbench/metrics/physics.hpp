#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "gridbench/grid/case.hpp"
#include "gridbench/metrics/prediction.hpp"
#include "gridbench/scenario/dataset.hpp"

namespace gridbench::metrics {

/// Joule-law check: R * mean(a)^2 (squared, the physical law) or the
/// unsquared R * mean(a) kept for comparison with the printed table.
enum class JouleForm { Squared, Unsquared };

struct PhysicsTolerances {
  double loss_ratio_min = 0.005;  // P5 range [min, el_tolerance]
  double el_tolerance = 0.04;
  /// Relative-residual levels above which a sample (P6, P8) or a node (P7)
  /// counts as violating; reported alongside the MAPE values.
  double gc_tolerance = 1e-3;
  double lc_tolerance = 1e-2;
  double joule_tolerance = 1e-2;
  double nonnull_eps = 1e-6;    // P4: |x| above this is non-null (A, MW, MVAr)
  double negative_eps = 1e-6;   // P3: losses below -eps MW count as negative
  double node_floor_pu = 1e-3;  // P7 denominator floor
  double phase_factor = std::sqrt(3.0);
  JouleForm joule = JouleForm::Squared;
};

struct PhysicsReport {
  std::array<double, 8> p{};  // P1..P8
  double gc_violation = 0.0;
  double lc_violation = 0.0;
  double joule_violation = 0.0;
  std::size_t disconnected_entries = 0;  // P4 denominator
  PhysicsTolerances tolerances;

  std::vector<double> values() const { return {p.begin(), p.end()}; }
};

inline const std::vector<const char*> kPhysicsMetricNames = {"P1", "P2", "P3", "P4", "P5", "P6", "P7", "P8"};

/// P1-P4 and P5 are proportions; P6-P8 are mean relative residuals.
PhysicsReport evaluate_physics(const grid::GridCase& grid_case, const PredictionSet& pred,
                               const scenario::Dataset& truth, const PhysicsTolerances& tol = {});

/// Per-sample building blocks, exposed for tests and the projection.
struct SampleBalance {
  double production = 0.0;  // MW
  double load = 0.0;        // MW
  std::vector<double> node_injection;  // MW per node of the sample's node map
  std::vector<double> node_flow;       // sum of predicted p leaving each node
};

SampleBalance sample_balance(const grid::GridCase& grid_case, const scenario::Sample& sample,
                             const powerflow::LineFlows& pred);

}  // namespace gridbench::metrics
