#include "gridbench/contingency/batch.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <memory>

#include <Eigen/SparseLU>

#include "gridbench/contingency/block_system.hpp"
#include "gridbench/contingency/cluster.hpp"
#include "gridbench/contingency/pcg.hpp"
#include "gridbench/error.hpp"
#include "gridbench/parallel.hpp"
#include "gridbench/powerflow/dc.hpp"
#include "gridbench/powerflow/line_flows.hpp"

namespace gridbench::contingency {

using powerflow::NodeState;
using powerflow::NodeType;
using Clock = std::chrono::steady_clock;

const char* to_string(ScenarioStatus s) {
  switch (s) {
    case ScenarioStatus::Converged: return "converged";
    case ScenarioStatus::NotConverged: return "not_converged";
    case ScenarioStatus::InvalidTopology: return "invalid_topology";
    case ScenarioStatus::Failed: return "failed";
  }
  return "?";
}

std::size_t BatchResult::converged_count() const {
  return static_cast<std::size_t>(std::count_if(outcomes.begin(), outcomes.end(), [](const auto& o) {
    return o.status == ScenarioStatus::Converged;
  }));
}

std::vector<grid::Topology> n1_topologies(const grid::GridCase& c, const grid::Topology& base) {
  std::vector<grid::Topology> out;
  out.reserve(c.line_count());
  for (std::size_t l = 0; l < c.line_count(); ++l) {
    out.push_back(base);
    out.back().line_status[l] = 0;
  }
  return out;
}

namespace {

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

using Lu = Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>>;

// Maps a vector over a scenario's own node map onto the cluster base map.
Eigen::VectorXd to_base(const grid::NodeMap& own, const grid::NodeMap& base, const Eigen::VectorXd& values) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(base.size()));
  for (std::size_t j = 0; j < own.size(); ++j) {
    const auto [sub, bb] = own.key_of[j];
    out[base.node(sub, bb)] = values[static_cast<Eigen::Index>(j)];
  }
  return out;
}

NodeState initial_member_state(const grid::GridCase& c, const grid::Topology& topo, const MemberSystem& m,
                               const grid::NodeMap& base_nodes, const powerflow::Injections& inj,
                               const powerflow::SolverOptions& opts, const BatchOptions& bopts) {
  const auto n = static_cast<Eigen::Index>(base_nodes.size());
  NodeState s;
  s.type = m.cls.type;
  s.vm = Eigen::VectorXd::Ones(n);
  s.va = Eigen::VectorXd::Zero(n);
  if (opts.initializer != powerflow::Initializer::Flat) {
    const grid::NodeMap own = grid::compute_node_map(c, topo);
    if (opts.initializer == powerflow::Initializer::DcWarmStart) {
      s.va = to_base(own, base_nodes, powerflow::dc_power_flow(c, topo, inj).theta);
    } else {
      if (!bopts.initializer) throw ValidationError("external initializer selected without an initializer hook");
      const WarmStart ws = bopts.initializer(m.scenario, own);
      if (ws.va.size() != static_cast<Eigen::Index>(own.size())) {
        throw ValidationError("external initializer has the wrong angle dimension");
      }
      s.va = to_base(own, base_nodes, ws.va);
      if (ws.vm.size() == ws.va.size()) s.vm = to_base(own, base_nodes, ws.vm);
    }
  }
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto t = m.cls.type[static_cast<std::size_t>(k)];
    if (t == NodeType::PV || t == NodeType::Slack) s.vm[k] = m.cls.v_set[k];
    if (t == NodeType::Dead) s.vm[k] = s.va[k] = 0.0;
  }
  if (m.cls.slack >= 0) s.va[m.cls.slack] = 0.0;
  return s;
}

struct MemberProgress {
  bool done = false;
  int iterations = 0;
};

// Symbolic factorizations per pattern group, one cache per worker.
using LuCache = std::map<int, std::unique_ptr<Lu>>;

}  // namespace

BatchResult batch_solve(const grid::GridCase& c, std::span<const grid::Topology> topologies,
                        std::span<const powerflow::Injections> injections, const powerflow::SolverOptions& opts,
                        const BatchOptions& bopts) {
  const auto t_start = Clock::now();
  opts.check();
  if (topologies.size() != injections.size()) {
    throw ValidationError("batch_solve needs one injection set per topology");
  }
  BatchResult result;
  result.outcomes.resize(topologies.size());
  const std::size_t jobs = bopts.jobs;

  // Validation; invalid scenarios keep their slot and are skipped.
  std::vector<grid::Topology> valid_topos;
  std::vector<std::size_t> valid_ids;
  for (std::size_t i = 0; i < topologies.size(); ++i) {
    injections[i].check(c);
    const auto verdict = grid::validate_topology(c, topologies[i]);
    if (!verdict) {
      result.outcomes[i].status = ScenarioStatus::InvalidTopology;
      result.outcomes[i].message = verdict.reason;
      continue;
    }
    valid_ids.push_back(i);
    valid_topos.push_back(topologies[i]);
  }
  std::vector<powerflow::Injections> valid_inj;
  valid_inj.reserve(valid_ids.size());
  for (std::size_t id : valid_ids) valid_inj.push_back(injections[id]);

  const auto clusters = cluster_scenarios(c, valid_topos);
  result.cluster_count = clusters.size();
  result.timing.setup += seconds_since(t_start);

  for (const auto& cluster : clusters) {
    auto t0 = Clock::now();
    ClusterWorkspace ws(c, cluster, valid_topos, valid_inj);
    auto& members = ws.members();
    const std::size_t count = members.size();
    std::vector<NodeState> states(count);
    std::vector<MemberProgress> progress(count);
    std::vector<ScenarioOutcome> local(count);
    parallel_for(count, jobs, [&](std::size_t m) {
      const std::size_t id = members[m].scenario;
      try {
        states[m] = initial_member_state(c, valid_topos[id], members[m], cluster.base.nodes, valid_inj[id], opts, bopts);
      } catch (const Error& e) {
        progress[m].done = true;
        local[m].status = ScenarioStatus::Failed;
        local[m].message = e.what();
      }
    });
    result.timing.setup += seconds_since(t0);
    std::vector<LuCache> lu_caches(resolve_jobs(jobs));

    for (int it = 0; it <= opts.max_iterations; ++it) {
      std::vector<std::size_t> active;
      for (std::size_t m = 0; m < count; ++m) {
        if (!progress[m].done) active.push_back(m);
      }
      if (active.empty()) break;

      t0 = Clock::now();
      const BlockSystem sys = assemble_block_system(ws, states, active, jobs);
      result.timing.assembly += seconds_since(t0);

      std::vector<std::size_t> to_solve;
      for (std::size_t b = 0; b < sys.block_count(); ++b) {
        const std::size_t m = sys.members[b];
        const double norm = sys.mismatch_norm[b];
        local[m].final_mismatch = norm;
        if (!std::isfinite(norm)) {
          progress[m].done = true;
          local[m].status = ScenarioStatus::NotConverged;
          local[m].message = "mismatch diverged to a non-finite value";
        } else if (norm < opts.tolerance) {
          progress[m].done = true;
          progress[m].iterations = it + 1;
          local[m].status = ScenarioStatus::Converged;
        } else if (it == opts.max_iterations) {
          progress[m].done = true;
          local[m].status = ScenarioStatus::NotConverged;
          local[m].message = "Newton-Raphson did not converge after " + std::to_string(it) + " iterations";
        } else {
          to_solve.push_back(b);
        }
      }

      t0 = Clock::now();
      parallel_for_workers(to_solve.size(), jobs, [&](std::size_t j, std::size_t worker) {
        const std::size_t b = to_solve[j];
        const std::size_t m = sys.members[b];
        Eigen::VectorXd dx;
        bool solved = false;
        if (bopts.linear_solver == LinearSolver::Pcg) {
          const double tol = std::clamp(bopts.inner_tolerance_factor * sys.mismatch_norm[b],
                                        bopts.inner_tolerance_min, bopts.inner_tolerance_max);
          const BlockSolveResult r = pcg_solve_block(sys.blocks[b], sys.rhs[b], tol, bopts.pcg_max_iterations);
          local[m].pcg_iterations += r.iterations;
          if (r.converged) {
            dx = r.x;
            solved = true;
          }
        }
        if (!solved) {
          auto& lu = lu_caches[worker][members[m].pattern_group];
          if (!lu) {
            lu = std::make_unique<Lu>();
            lu->analyzePattern(sys.blocks[b]);
          }
          lu->factorize(sys.blocks[b]);
          ++local[m].direct_solves;
          if (lu->info() != Eigen::Success) {
            progress[m].done = true;
            local[m].status = ScenarioStatus::Failed;
            local[m].message = "singular Jacobian at iteration " + std::to_string(it + 1);
            return;
          }
          dx = lu->solve(sys.rhs[b]);
        }
        const auto& layout = members[m].layout;
        auto& s = states[m];
        for (std::size_t k = 0; k < layout.angle.size(); ++k) {
          const auto kk = static_cast<Eigen::Index>(k);
          if (layout.angle[k] >= 0) s.va[kk] += dx[layout.angle[k]];
          if (layout.magnitude[k] >= 0) s.vm[kk] += dx[layout.magnitude[k]];
        }
      });
      result.timing.linear_solve += seconds_since(t0);
    }

    t0 = Clock::now();
    parallel_for(count, jobs, [&](std::size_t m) {
      if (local[m].status != ScenarioStatus::Converged) return;
      const std::size_t id = members[m].scenario;
      const auto& topo = valid_topos[id];
      const grid::NodeMap own = grid::compute_node_map(c, topo);
      powerflow::PowerFlowSolution sol;
      sol.nodes = own;
      sol.state.vm.resize(static_cast<Eigen::Index>(own.size()));
      sol.state.va.resize(static_cast<Eigen::Index>(own.size()));
      sol.state.type.resize(own.size());
      for (std::size_t j = 0; j < own.size(); ++j) {
        const auto [sub, bb] = own.key_of[j];
        const int k = cluster.base.nodes.node(sub, bb);
        const auto jj = static_cast<Eigen::Index>(j);
        sol.state.vm[jj] = states[m].vm[k];
        sol.state.va[jj] = states[m].va[k];
        sol.state.type[j] = members[m].cls.type[static_cast<std::size_t>(k)];
      }
      sol.iterations = progress[m].iterations;
      sol.mismatch_norm = local[m].final_mismatch;
      sol.lines = powerflow::compute_line_flows(c, topo, own, sol.state);
      powerflow::realized_production(c, topo, cluster.base.nodes, members[m].y,
                                     powerflow::complex_voltage(states[m]), valid_inj[id], sol.prod_p, sol.prod_q);
      local[m].solution = std::move(sol);
    });
    for (std::size_t m = 0; m < count; ++m) {
      result.outcomes[valid_ids[members[m].scenario]] = std::move(local[m]);
    }
    result.timing.post_processing += seconds_since(t0);
  }
  result.timing.total = seconds_since(t_start);
  return result;
}

}  // namespace gridbench::contingency
