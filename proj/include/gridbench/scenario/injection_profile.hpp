#pragma once

#include "gridbench/grid/case.hpp"
#include "gridbench/powerflow/types.hpp"
#include "gridbench/scenario/config.hpp"
#include "gridbench/scenario/rng.hpp"

namespace gridbench::scenario {

/// Scales nominal loads by a system level times correlated log-normal
/// multipliers (constant power factor) and dispatches generation in
/// proportion to nominal output. Generators with zero nominal output stay
/// at zero. The slack setpoint is only a placeholder; the solver balances it.
powerflow::Injections sample_injections(const grid::GridCase& grid_case, const InjectionParams& params, Rng& env);

}  // namespace gridbench::scenario
