#include "gridbench/scenario/dataset.hpp"

#include <exception>

#include "gridbench/error.hpp"
#include "gridbench/parallel.hpp"
#include "gridbench/powerflow/newton.hpp"
#include "gridbench/scenario/injection_profile.hpp"
#include "gridbench/scenario/rng.hpp"
#include "gridbench/scenario/sampler.hpp"

namespace gridbench::scenario {

powerflow::SolverOptions reference_solver_options() {
  powerflow::SolverOptions o;
  o.initializer = powerflow::Initializer::DcWarmStart;
  return o;
}

powerflow::PowerFlowSolution resolve_sample(const grid::GridCase& c, const Sample& s) {
  return powerflow::solve_newton_raphson(c, s.topology, s.injections, reference_solver_options());
}

PhysicsAttributes physics_attributes(const grid::GridCase& c, const grid::Topology& topo,
                                     const powerflow::Injections& inj) {
  const grid::AdmittanceMatrix y = grid::build_ybus(c, topo);
  const auto cls = powerflow::classify_nodes(c, topo, y.nodes, inj);
  PhysicsAttributes a;
  a.nodes = y.nodes.key_of;
  for (Eigen::Index col = 0; col < y.y.outerSize(); ++col) {
    for (grid::ComplexSparse::InnerIterator it(y.y, col); it; ++it) {
      a.ybus.push_back({static_cast<int>(it.row()), static_cast<int>(it.col()), it.value()});
    }
  }
  for (std::size_t k = 0; k < y.nodes.size(); ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    a.sbus.emplace_back(cls.p_spec[kk], cls.q_spec[kk]);
    if (cls.type[k] == powerflow::NodeType::PV) a.pv_nodes.push_back(static_cast<int>(k));
  }
  a.slack = cls.slack;
  return a;
}

double loss_ratio(const powerflow::Injections& inj, const powerflow::LineFlows& flows) {
  double prod = 0.0, losses = 0.0;
  for (double p : inj.prod_p) prod += p;
  for (std::size_t l = 0; l < flows.size(); ++l) losses += flows.p_or[l] + flows.p_ex[l];
  return prod > 0.0 ? losses / prod : 0.0;
}

namespace {

struct Draw {
  powerflow::Injections inj;
  Scenario scenario;
};

enum class Verdict : std::uint8_t { Ok, SolverFailed, LossOutOfRange };

Verdict solve_into(const grid::GridCase& c, const ScenarioConfig& cfg, const Draw& d, Sample& out) {
  try {
    const auto sol = powerflow::solve_newton_raphson(c, d.scenario.topology, d.inj, reference_solver_options());
    out.injections = d.inj;
    out.injections.prod_p = sol.prod_p;
    out.topology = d.scenario.topology;
    out.flows = sol.lines;
    out.reference_actions = d.scenario.reference_actions;
    out.disconnected_lines = d.scenario.disconnected_lines;
    if (cfg.loss_ratio_range) {
      const double r = loss_ratio(out.injections, out.flows);
      if (r < cfg.loss_ratio_range->first || r > cfg.loss_ratio_range->second) return Verdict::LossOutOfRange;
    }
    if (cfg.store_physics) out.physics = physics_attributes(c, out.topology, out.injections);
    return Verdict::Ok;
  } catch (const ConvergenceError&) {
    return Verdict::SolverFailed;
  }
}

}  // namespace

Dataset generate_dataset(const grid::GridCase& c, const ScenarioConfig& cfg, const std::string& split,
                         const GenerateOptions& opts) {
  cfg.check();
  const SplitConfig& sc = cfg.split(split);
  const std::size_t n = opts.samples.value_or(sc.samples);
  if (n == 0) throw ValidationError(split + ": sample count must be positive");

  Dataset ds;
  ds.split = split;
  ds.env_seed = sc.env_seed;
  ds.actor_seed = sc.actor_seed;
  ds.config_hash = opts.config_hash;
  ds.case_hash = opts.case_hash;

  Rng env(sc.env_seed);
  Rng actor(sc.actor_seed);
  ScenarioSampler sampler(c, cfg, split);
  auto draw = [&] {
    Draw d;
    d.inj = sample_injections(c, cfg.injections, env);
    d.scenario = sampler.sample(actor);
    ds.topology_redraws += d.scenario.redraws;
    return d;
  };

  // Sampling is sequential (one stream per role); solves fan out.
  std::vector<Draw> draws;
  draws.reserve(n);
  for (std::size_t i = 0; i < n; ++i) draws.push_back(draw());

  ds.samples.resize(n);
  std::vector<Verdict> verdict(n);
  parallel_for(n, opts.jobs, [&](std::size_t i) { verdict[i] = solve_into(c, cfg, draws[i], ds.samples[i]); });

  for (std::size_t i = 0; i < n; ++i) {
    int attempts = 0;
    while (verdict[i] != Verdict::Ok) {
      if (++attempts > cfg.max_redraws) {
        throw ValidationError(split + ": sample " + std::to_string(i) + " still rejected after " +
                              std::to_string(cfg.max_redraws) + " redraws");
      }
      ++(verdict[i] == Verdict::SolverFailed ? ds.solver_redraws : ds.loss_redraws);
      verdict[i] = solve_into(c, cfg, draw(), ds.samples[i]);
    }
  }
  return ds;
}

}  // namespace gridbench::scenario
