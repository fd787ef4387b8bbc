#include "gridbench/surrogate/mask.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "gridbench/error.hpp"
#include "gridbench/parallel.hpp"

namespace gridbench::surrogate {

void apply_hard_zero_mask(powerflow::LineFlows& f, const grid::Topology& topo) {
  for (std::size_t l = 0; l < topo.line_status.size(); ++l) {
    if (topo.line_status[l]) continue;
    for (auto* v : {&f.a_or, &f.a_ex, &f.p_or, &f.p_ex, &f.q_or, &f.q_ex}) {
      if (l < v->size()) (*v)[l] = 0.0;
    }
  }
}

metrics::PredictionSet apply_hard_zero_mask(const metrics::PredictionSet& pred,
                                            std::span<const grid::Topology> topologies) {
  if (pred.size() != topologies.size()) throw ValidationError("mask needs one topology per prediction");
  metrics::PredictionSet out = pred;
  for (std::size_t i = 0; i < out.size(); ++i) apply_hard_zero_mask(out.samples[i], topologies[i]);
  return out;
}

HardConstraintResult enforce_hard_constraints(const grid::GridCase& c, const metrics::PredictionSet& pred,
                                              std::span<const scenario::Sample> inputs, std::size_t jobs,
                                              double tolerance, const KktProjector* projector) {
  if (pred.size() != inputs.size()) throw ValidationError("predictions and inputs differ in sample count");
  HardConstraintResult res;
  res.predictions.samples.resize(pred.size());
  std::vector<double> residual(pred.size(), 0.0);
  std::optional<KktProjector> local;
  if (!projector) projector = &local.emplace(c);
  parallel_for(pred.size(), jobs, [&](std::size_t i) {
    const auto& s = inputs[i];
    powerflow::LineFlows f = pred.samples[i];
    apply_hard_zero_mask(f, s.topology);
    f = projector->project(f, s.topology, s.injections);
    apply_hard_zero_mask(f, s.topology);
    const auto sys = build_conservation_constraints(c, s.topology, s.injections);
    const Eigen::VectorXd r = sys.a * flatten_active_power(f) - sys.b;
    residual[i] = r.size() ? r.cwiseAbs().maxCoeff() : 0.0;
    res.predictions.samples[i] = std::move(f);
  });
  res.max_residual = residual.empty() ? 0.0 : *std::max_element(residual.begin(), residual.end());
  if (!(res.max_residual <= tolerance)) {
    throw ValidationError("conservation residual " + std::to_string(res.max_residual) + " MW after projection");
  }
  return res;
}

metrics::PredictionSet HardConstrainedSimulator::predict(std::span<const scenario::Sample> inputs) const {
  return enforce_hard_constraints(*case_, inner_->predict(inputs), inputs, jobs_, 1e-8, &projector_).predictions;
}

}  // namespace gridbench::surrogate
