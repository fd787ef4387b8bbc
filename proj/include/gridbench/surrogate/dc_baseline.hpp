#pragma once

#include <vector>

#include "gridbench/grid/case.hpp"
#include "gridbench/surrogate/surrogate.hpp"

namespace gridbench::surrogate {

/// Physics-free reference point: active flows from the DC approximation,
/// line-end voltages from training means, currents from both. Reactive
/// flows are predicted as zero.
class DcBaseline final : public AugmentedSimulator {
 public:
  explicit DcBaseline(const grid::GridCase& grid_case);

  std::string name() const override { return "dc_baseline"; }
  Capabilities capabilities() const override { return {}; }
  /// Per line end, the mean voltage over training samples where the line is
  /// connected; substation base voltage when it never is.
  void fit(const scenario::Dataset& train) override;
  /// Throws ValidationError when a topology islands the DC system.
  metrics::PredictionSet predict(std::span<const scenario::Sample> inputs) const override;

  const std::vector<double>& mean_v_or() const noexcept { return v_or_; }
  const std::vector<double>& mean_v_ex() const noexcept { return v_ex_; }

 private:
  const grid::GridCase* case_;
  std::vector<double> v_or_, v_ex_;
};

}  // namespace gridbench::surrogate
