#pragma once

#include <cstddef>
#include <vector>

#include "gridbench/powerflow/types.hpp"

namespace gridbench::metrics {

/// Per-sample line outputs of a surrogate, aligned with a dataset. q and
/// theta vectors may be left empty.
struct PredictionSet {
  std::vector<powerflow::LineFlows> samples;

  std::size_t size() const noexcept { return samples.size(); }
};

}  // namespace gridbench::metrics
