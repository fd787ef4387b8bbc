#include "gridbench/contingency/cluster.hpp"

#include <map>

namespace gridbench::contingency {

std::vector<ScenarioCluster> cluster_scenarios(const grid::GridCase& c, std::span<const grid::Topology> scenarios) {
  std::vector<ScenarioCluster> clusters;
  std::map<std::vector<int>, std::size_t> index;
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    const auto& sig = scenarios[i].busbar;
    auto [it, inserted] = index.emplace(sig, clusters.size());
    if (inserted) {
      ScenarioCluster cl;
      cl.signature = sig;
      cl.base_topology.busbar = sig;
      cl.base_topology.line_status.assign(c.line_count(), 1);
      clusters.push_back(std::move(cl));
    }
    clusters[it->second].members.push_back(i);
  }
  for (auto& cl : clusters) cl.base = grid::build_ybus(c, cl.base_topology);
  return clusters;
}

}  // namespace gridbench::contingency
