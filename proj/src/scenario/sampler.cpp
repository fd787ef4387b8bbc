#include "gridbench/scenario/sampler.hpp"

#include <algorithm>
#include <deque>
#include <set>

#include "gridbench/error.hpp"

namespace gridbench::scenario {

LineDistance::LineDistance(const grid::GridCase& c) : case_(&c), n_(c.substation_count()) {
  std::vector<std::vector<int>> adj(n_);
  for (const auto& l : c.lines()) {
    adj[static_cast<std::size_t>(l.sub_or)].push_back(l.sub_ex);
    adj[static_cast<std::size_t>(l.sub_ex)].push_back(l.sub_or);
  }
  hops_.assign(n_ * n_, -1);
  for (std::size_t s = 0; s < n_; ++s) {
    int* row = hops_.data() + s * n_;
    std::deque<int> queue{static_cast<int>(s)};
    row[s] = 0;
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      for (int v : adj[static_cast<std::size_t>(u)]) {
        if (row[v] >= 0) continue;
        row[v] = row[u] + 1;
        queue.push_back(v);
      }
    }
  }
}

int LineDistance::lines(int l1, int l2) const {
  const auto& a = case_->lines().at(static_cast<std::size_t>(l1));
  const auto& b = case_->lines().at(static_cast<std::size_t>(l2));
  int best = -1;
  for (int x : {a.sub_or, a.sub_ex}) {
    for (int y : {b.sub_or, b.sub_ex}) {
      const int d = substations(x, y);
      if (d >= 0 && (best < 0 || d < best)) best = d;
    }
  }
  return best;
}

ScenarioSampler::ScenarioSampler(const grid::GridCase& c, const ScenarioConfig& cfg, const std::string& split)
    : case_(&c), cfg_(&cfg), split_(&cfg.split(split)), distance_(c), reference_(grid::Topology::reference(c)) {
  check_against_case(cfg, c);
}

bool ScenarioSampler::draw_lines(Rng& rng, std::size_t count, bool region, std::vector<int>& out) {
  out.clear();
  if (count == 0) return true;
  const int n = static_cast<int>(case_->line_count());
  if (count > static_cast<std::size_t>(n)) return false;
  if (!region) {
    // Partial Fisher-Yates over line indices.
    std::vector<int> pool(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
    for (std::size_t k = 0; k < count; ++k) {
      const std::size_t j = k + rng.uniform_index(pool.size() - k);
      std::swap(pool[k], pool[j]);
      out.push_back(pool[k]);
    }
  } else {
    // Each further line is uniform among those within the region of every
    // line already chosen.
    const int radius = *split_->region_distance;
    out.push_back(static_cast<int>(rng.uniform_index(static_cast<std::size_t>(n))));
    while (out.size() < count) {
      std::vector<int> candidates;
      for (int l = 0; l < n; ++l) {
        if (std::find(out.begin(), out.end(), l) != out.end()) continue;
        const bool close = std::all_of(out.begin(), out.end(), [&](int m) {
          const int d = distance_.lines(l, m);
          return d >= 0 && d <= radius;
        });
        if (close) candidates.push_back(l);
      }
      if (candidates.empty()) return false;
      out.push_back(candidates[rng.uniform_index(candidates.size())]);
    }
  }
  std::sort(out.begin(), out.end());
  return true;
}

bool ScenarioSampler::draw_stage(Rng& rng, const SamplingParams& params, std::size_t action_count, bool region,
                                 Draw& out) {
  out.actions.clear();
  out.lines.clear();
  if (rng.uniform() < params.prob_do_nothing) return true;
  const std::size_t depth = rng.choose(params.prob_depth) + 1;
  std::size_t bus = 0, line = 0;
  for (std::size_t d = 0; d < depth; ++d) {
    if (rng.choose(params.prob_type) == 0) ++bus;
    else ++line;
  }
  if (line > static_cast<std::size_t>(params.max_disc)) return false;
  if (bus > action_count) return false;
  std::vector<int> pool(action_count);
  for (std::size_t i = 0; i < action_count; ++i) pool[i] = static_cast<int>(i);
  for (std::size_t k = 0; k < bus; ++k) {
    const std::size_t j = k + rng.uniform_index(pool.size() - k);
    std::swap(pool[k], pool[j]);
    out.actions.push_back(pool[k]);
  }
  std::sort(out.actions.begin(), out.actions.end());
  return draw_lines(rng, line, region, out.lines);
}

Scenario ScenarioSampler::sample(Rng& rng) {
  Scenario sc;
  const auto& actions = cfg_->reference_actions;
  const bool region = split_->region_distance.has_value();
  Draw ref, own;
  for (;;) {
    if (sc.redraws > static_cast<std::size_t>(cfg_->max_redraws)) {
      throw ValidationError(split_->name + ": no valid scenario after " + std::to_string(cfg_->max_redraws) +
                            " redraws (configuration unsatisfiable)");
    }
    // Reference stage: set_bus actions on distinct substations.
    if (!draw_stage(rng, cfg_->reference, actions.size(), false, ref)) {
      ++sc.redraws;
      continue;
    }
    std::set<int> touched;
    bool legal = true;
    for (int a : ref.actions) {
      for (const auto& sb : actions[static_cast<std::size_t>(a)].set_bus) {
        legal = legal && touched.insert(sb.substation_id).second;
      }
    }
    // Split stage; its own bus actions also come from the reference list.
    if (!legal || !draw_stage(rng, split_->params, actions.size(), region, own)) {
      ++sc.redraws;
      continue;
    }
    for (int a : own.actions) {
      for (const auto& sb : actions[static_cast<std::size_t>(a)].set_bus) {
        legal = legal && touched.insert(sb.substation_id).second;
      }
    }
    std::vector<int> lines = ref.lines;
    lines.insert(lines.end(), own.lines.begin(), own.lines.end());
    std::sort(lines.begin(), lines.end());
    if (!legal || std::adjacent_find(lines.begin(), lines.end()) != lines.end()) {
      ++sc.redraws;
      continue;
    }

    grid::Topology topo = reference_;
    std::vector<int> applied = ref.actions;
    applied.insert(applied.end(), own.actions.begin(), own.actions.end());
    for (int a : applied) {
      for (const auto& sb : actions[static_cast<std::size_t>(a)].set_bus) topo = grid::apply_topology_action(*case_, topo, sb);
    }
    for (int l : lines) topo.line_status[static_cast<std::size_t>(l)] = 0;
    if (!grid::validate_topology(*case_, topo)) {
      ++sc.redraws;
      continue;
    }
    sc.reference_actions = std::move(applied);
    sc.disconnected_lines = std::move(lines);
    sc.topology = std::move(topo);
    return sc;
  }
}

}  // namespace gridbench::scenario
