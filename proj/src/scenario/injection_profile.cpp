#include "gridbench/scenario/injection_profile.hpp"

#include <algorithm>
#include <cmath>

namespace gridbench::scenario {

powerflow::Injections sample_injections(const grid::GridCase& c, const InjectionParams& params, Rng& env) {
  params.check();
  powerflow::Injections inj = powerflow::Injections::nominal(c);
  const double level = params.level_min + (params.level_max - params.level_min) * env.uniform();
  const double common = env.normal();
  const double s = params.load_sigma;
  const double w_common = std::sqrt(params.load_correlation);
  const double w_own = std::sqrt(1.0 - params.load_correlation);
  double total_load = 0.0;
  for (std::size_t l = 0; l < inj.load_p.size(); ++l) {
    const double z = w_common * common + w_own * env.normal();
    // Mean-one multiplier.
    const double m = level * std::exp(s * z - 0.5 * s * s);
    inj.load_p[l] *= m;
    inj.load_q[l] *= m;
    total_load += inj.load_p[l];
  }

  double nominal_gen = 0.0;
  for (const auto& g : c.generators()) nominal_gen += std::max(g.p_mw, 0.0);
  const double target = total_load * (1.0 + params.loss_factor);
  for (std::size_t g = 0; g < inj.prod_p.size(); ++g) {
    const double share = nominal_gen > 0.0 ? std::max(c.generators()[g].p_mw, 0.0) / nominal_gen : 0.0;
    inj.prod_p[g] = target * share;
    if (params.voltage_jitter > 0.0) inj.prod_v[g] *= 1.0 + params.voltage_jitter * (2.0 * env.uniform() - 1.0);
  }
  return inj;
}

}  // namespace gridbench::scenario
