#include "gridbench/surrogate/dc_baseline.hpp"

#include <cmath>

#include "gridbench/error.hpp"
#include "gridbench/powerflow/dc.hpp"

namespace gridbench::surrogate {

using grid::ElementKind;

DcBaseline::DcBaseline(const grid::GridCase& c) : case_(&c) {
  const auto& lines = c.lines();
  v_or_.resize(lines.size());
  v_ex_.resize(lines.size());
  for (std::size_t l = 0; l < lines.size(); ++l) {
    v_or_[l] = c.substations()[static_cast<std::size_t>(lines[l].sub_or)].base_kv;
    v_ex_[l] = c.substations()[static_cast<std::size_t>(lines[l].sub_ex)].base_kv;
  }
}

void DcBaseline::fit(const scenario::Dataset& train) {
  const std::size_t L = case_->line_count();
  std::vector<double> sum_or(L, 0.0), sum_ex(L, 0.0);
  std::vector<std::size_t> count(L, 0);
  for (const auto& s : train.samples) {
    if (s.flows.size() != L || s.topology.line_status.size() != L) {
      throw ValidationError("training sample does not match the case line count");
    }
    for (std::size_t l = 0; l < L; ++l) {
      if (!s.topology.connected(l)) continue;
      sum_or[l] += s.flows.v_or[l];
      sum_ex[l] += s.flows.v_ex[l];
      ++count[l];
    }
  }
  for (std::size_t l = 0; l < L; ++l) {
    if (count[l] == 0) continue;
    v_or_[l] = sum_or[l] / static_cast<double>(count[l]);
    v_ex_[l] = sum_ex[l] / static_cast<double>(count[l]);
  }
}

metrics::PredictionSet DcBaseline::predict(std::span<const scenario::Sample> inputs) const {
  const auto& c = *case_;
  const std::size_t L = c.line_count();
  metrics::PredictionSet out;
  out.samples.resize(inputs.size());
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const auto& s = inputs[i];
    const auto dc = powerflow::dc_power_flow(c, s.topology, s.injections);
    const auto flow = powerflow::dc_line_flows(c, s.topology, dc);
    auto& f = out.samples[i];
    f.resize(L);
    for (std::size_t l = 0; l < L; ++l) {
      if (!s.topology.connected(l)) continue;  // resize() left zeros
      const int li = static_cast<int>(l);
      f.p_or[l] = flow[l];
      f.p_ex[l] = -flow[l];
      f.v_or[l] = v_or_[l];
      f.v_ex[l] = v_ex_[l];
      f.a_or[l] = std::abs(flow[l]) * 1000.0 / (powerflow::kThreePhaseFactor * v_or_[l]);
      f.a_ex[l] = std::abs(flow[l]) * 1000.0 / (powerflow::kThreePhaseFactor * v_ex_[l]);
      f.theta_or[l] = dc.theta[grid::element_node(c, s.topology, dc.nodes, {ElementKind::LineOr, li})];
      f.theta_ex[l] = dc.theta[grid::element_node(c, s.topology, dc.nodes, {ElementKind::LineEx, li})];
    }
  }
  return out;
}

}  // namespace gridbench::surrogate
