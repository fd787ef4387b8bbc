#include <doctest.h>

#include <random>

#include <Eigen/LU>

#include "gridbench/contingency/batch.hpp"
#include "gridbench/contingency/block_system.hpp"
#include "gridbench/contingency/cluster.hpp"
#include "gridbench/contingency/delta.hpp"
#include "gridbench/contingency/pcg.hpp"
#include "gridbench/error.hpp"
#include "gridbench/powerflow/newton.hpp"
#include "support.hpp"

using namespace gridbench;
using namespace gridbench::contingency;
using gridbench::grid::Topology;
using gridbench::powerflow::Injections;

namespace {

// Random line outages on a fixed busbar layout; resamples until valid.
std::vector<Topology> random_outages(const grid::GridCase& c, const Topology& base, std::mt19937_64& rng, int count,
                                     int max_out) {
  std::vector<Topology> out;
  std::uniform_int_distribution<std::size_t> pick(0, c.line_count() - 1);
  std::uniform_int_distribution<int> k(0, max_out);
  while (static_cast<int>(out.size()) < count) {
    auto t = base;
    for (int i = k(rng); i > 0; --i) t.line_status[pick(rng)] = 0;
    if (grid::validate_topology(c, t)) out.push_back(t);
  }
  return out;
}

Eigen::SparseMatrix<double> random_sparse(std::mt19937_64& rng, int n, bool spd) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i == j || u(rng) > 0.6) m(i, j) = u(rng);
  if (spd) m = m.transpose() * m + n * Eigen::MatrixXd::Identity(n, n);
  else m += 4.0 * Eigen::MatrixXd::Identity(n, n);
  return m.sparseView();
}

}  // namespace

TEST_CASE("delta admittance reproduces a full rebuild bit for bit") {
  const auto& c = testing::case118();
  std::mt19937_64 rng(5);
  const auto ref = Topology::reference(c);
  auto scenarios = random_outages(c, ref, rng, 40, 4);
  const auto clusters = cluster_scenarios(c, scenarios);
  REQUIRE(clusters.size() == 1);
  const auto& cl = clusters[0];
  for (std::size_t s : cl.members) {
    const auto delta = build_delta_admittance(c, cl, scenarios[s], s);
    CHECK(delta.scenario == s);
    const auto y = apply_delta(cl.base.y, delta);
    CHECK(y.nonZeros() == cl.base.y.nonZeros());
    for (int col = 0; col < y.outerSize(); ++col)
      for (grid::ComplexSparse::InnerIterator it(y, col); it; ++it)
        CHECK(it.value() == grid::ybus_entry(c, scenarios[s], cl.base.nodes, static_cast<int>(it.row()), col));
  }
}

TEST_CASE("delta rejects a foreign busbar signature") {
  const auto& c = testing::case14();
  const auto ref = Topology::reference(c);
  std::vector<Topology> one{ref};
  const auto clusters = cluster_scenarios(c, one);
  auto other = ref;
  other.busbar[0] = 2;
  CHECK_THROWS_AS(build_delta_admittance(c, clusters[0], other), ValidationError);
}

TEST_CASE("clustering partitions by busbar signature") {
  const auto& c = testing::case14();
  const auto ref = Topology::reference(c);
  auto split = ref;
  // Bus 4 (index 3) split: every second roster entry to busbar 2.
  const int sub = 3;
  for (std::size_t i = 0; i < c.roster(sub).size(); i += 2) split.busbar[c.roster_offset(sub) + i] = 2;
  REQUIRE(grid::validate_topology(c, split));

  auto out1 = ref;
  out1.line_status[2] = 0;
  auto out2 = split;
  out2.line_status[7] = 0;
  const std::vector<Topology> list{split, ref, out1, out2, ref};
  const auto clusters = cluster_scenarios(c, list);
  REQUIRE(clusters.size() == 2);
  CHECK(clusters[0].members == std::vector<std::size_t>{0, 3});
  CHECK(clusters[1].members == std::vector<std::size_t>{1, 2, 4});
  for (const auto& cl : clusters) CHECK(cl.base_topology.disconnected_count() == 0);
}

TEST_CASE("cgnr agrees with a dense solve") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 5 + trial;
    const auto a = random_sparse(rng, n, trial % 2 == 0);
    const Eigen::VectorXd b = Eigen::VectorXd::Random(n);
    const auto res = pcg_solve_block(a, b, 1e-12, 10 * n);
    CHECK(res.converged);
    const Eigen::VectorXd dense = Eigen::MatrixXd(a).fullPivLu().solve(b);
    CHECK((res.x - dense).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("cgnr residual is non-increasing on spd systems") {
  std::mt19937_64 rng(13);
  const auto a = random_sparse(rng, 30, true);
  const Eigen::VectorXd b = Eigen::VectorXd::Ones(30);
  std::vector<double> history;
  pcg_solve_block(a, b, 1e-14, 200, &history);
  REQUIRE(history.size() > 2);
  for (std::size_t i = 1; i < history.size(); ++i) CHECK(history[i] <= history[i - 1] * (1.0 + 1e-12));
}

TEST_CASE("pcg argument checks") {
  BlockSystem empty;
  CHECK_THROWS_AS(pcg_solve(empty, 0.0, 10), ValidationError);
  CHECK_THROWS_AS(pcg_solve(empty, 1e-8, 0), ValidationError);
  // Zero right-hand side: solution is zero without iterating.
  Eigen::SparseMatrix<double> a(2, 2);
  a.setIdentity();
  const auto r = pcg_solve_block(a, Eigen::VectorXd::Zero(2), 1e-10, 10);
  CHECK(r.x.norm() == 0.0);
}

TEST_CASE("block system stacks member systems") {
  const auto& c = testing::case14();
  const auto topos = n1_topologies(c, Topology::reference(c));
  std::vector<Topology> valid;
  for (const auto& t : topos)
    if (grid::validate_topology(c, t)) valid.push_back(t);
  const std::vector<Injections> inj(valid.size(), Injections::nominal(c));
  const auto clusters = cluster_scenarios(c, valid);
  REQUIRE(clusters.size() == 1);
  ClusterWorkspace ws(c, clusters[0], valid, inj);
  CHECK(ws.members().size() == valid.size());

  std::vector<powerflow::NodeState> states;
  for (const auto& m : ws.members()) {
    powerflow::NodeState s;
    const auto n = static_cast<Eigen::Index>(clusters[0].base.nodes.size());
    s.vm = Eigen::VectorXd::Ones(n);
    s.va = Eigen::VectorXd::Zero(n);
    s.type = m.cls.type;
    states.push_back(s);
  }
  const auto sys = assemble_block_system(ws, states);
  CHECK(sys.block_count() == valid.size());
  const auto off = sys.offsets();
  CHECK(off.back() == sys.stacked_matrix().rows());
  const Eigen::VectorXd rhs = sys.stacked_rhs();
  CHECK((sys.block_of(rhs, 3) - sys.rhs[3]).norm() == 0.0);
}

TEST_CASE("batched n-1 matches sequential solves") {
  const auto& c = testing::case118();
  const auto topos = n1_topologies(c, Topology::reference(c));
  REQUIRE(topos.size() == 186);
  const std::vector<Injections> inj(topos.size(), Injections::nominal(c));
  powerflow::SolverOptions opts;
  opts.initializer = powerflow::Initializer::DcWarmStart;
  for (auto solver : {LinearSolver::Direct, LinearSolver::Pcg}) {
    BatchOptions bo;
    bo.jobs = 2;
    bo.linear_solver = solver;
    const auto batch = batch_solve(c, topos, inj, opts, bo);
    REQUIRE(batch.outcomes.size() == topos.size());
    std::size_t invalid = 0;
    double worst = 0.0;
    for (std::size_t i = 0; i < topos.size(); ++i) {
      const auto& o = batch.outcomes[i];
      if (!grid::validate_topology(c, topos[i])) {
        CHECK(o.status == ScenarioStatus::InvalidTopology);
        ++invalid;
        continue;
      }
      REQUIRE(o.status == ScenarioStatus::Converged);
      const auto seq = powerflow::solve_newton_raphson(c, topos[i], inj[i]);
      for (std::size_t l = 0; l < c.line_count(); ++l) {
        worst = std::max(worst, std::abs(o.solution->lines.p_or[l] - seq.lines.p_or[l]));
        worst = std::max(worst, std::abs(o.solution->lines.v_ex[l] - seq.lines.v_ex[l]) / 100.0);
      }
    }
    CHECK(invalid > 0);  // radial lines in the 118-bus case
    CHECK(batch.converged_count() + invalid == topos.size());
    CHECK(worst < 1e-5);
  }
}

TEST_CASE("batch reports failures in their slot") {
  const auto& c = testing::case14();
  auto heavy = Injections::nominal(c);
  for (auto& p : heavy.load_p) p *= 40.0;
  auto broken = Topology::reference(c);
  broken.busbar.pop_back();
  const std::vector<Topology> topos{Topology::reference(c), broken, Topology::reference(c)};
  const std::vector<Injections> inj{Injections::nominal(c), Injections::nominal(c), heavy};
  const auto r = batch_solve(c, topos, inj, {}, {});
  CHECK(r.outcomes[0].status == ScenarioStatus::Converged);
  CHECK(r.outcomes[1].status == ScenarioStatus::InvalidTopology);
  CHECK(r.outcomes[2].status == ScenarioStatus::NotConverged);
  CHECK_FALSE(r.outcomes[2].solution.has_value());
  CHECK(std::string(to_string(ScenarioStatus::Converged)) == "converged");
}
