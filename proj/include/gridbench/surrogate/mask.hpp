#pragma once

#include <cstddef>
#include <span>

#include "gridbench/grid/case.hpp"
#include "gridbench/grid/topology.hpp"
#include "gridbench/metrics/prediction.hpp"
#include "gridbench/scenario/dataset.hpp"
#include "gridbench/surrogate/kkt.hpp"
#include "gridbench/surrogate/surrogate.hpp"

namespace gridbench::surrogate {

/// Sets a, p and q of every disconnected line to exactly zero.
void apply_hard_zero_mask(powerflow::LineFlows& flows, const grid::Topology& topo);
metrics::PredictionSet apply_hard_zero_mask(const metrics::PredictionSet& pred,
                                            std::span<const grid::Topology> topologies);

struct HardConstraintResult {
  metrics::PredictionSet predictions;
  double max_residual = 0.0;  // worst |A y - b| over samples, MW
};

/// Mask, project onto nodal conservation, mask again, then check the
/// residual. Throws ValidationError when the residual exceeds `tolerance`.
/// Pass a long-lived projector to reuse its factorizations across calls.
HardConstraintResult enforce_hard_constraints(const grid::GridCase& grid_case, const metrics::PredictionSet& pred,
                                              std::span<const scenario::Sample> inputs, std::size_t jobs = 0,
                                              double tolerance = 1e-8, const KktProjector* projector = nullptr);

/// Wraps a model so its predictions go through enforce_hard_constraints.
class HardConstrainedSimulator final : public AugmentedSimulator {
 public:
  HardConstrainedSimulator(const grid::GridCase& grid_case, AugmentedSimulator& inner, std::size_t jobs = 1)
      : case_(&grid_case), inner_(&inner), projector_(grid_case), jobs_(jobs) {}

  std::string name() const override { return inner_->name() + "+kkt"; }
  Capabilities capabilities() const override { return inner_->capabilities(); }
  void fit(const scenario::Dataset& train) override { inner_->fit(train); }
  metrics::PredictionSet predict(std::span<const scenario::Sample> inputs) const override;

 private:
  const grid::GridCase* case_;
  AugmentedSimulator* inner_;
  KktProjector projector_;
  std::size_t jobs_;
};

}  // namespace gridbench::surrogate
