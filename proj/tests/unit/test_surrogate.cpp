#include <doctest.h>

#include <random>

#include <Eigen/LU>

#include "gridbench/error.hpp"
#include "gridbench/metrics/physics.hpp"
#include "gridbench/scenario/dataset.hpp"
#include "gridbench/surrogate/dc_baseline.hpp"
#include "gridbench/surrogate/kkt.hpp"
#include "gridbench/surrogate/mask.hpp"
#include "support.hpp"

using namespace gridbench;
using namespace gridbench::surrogate;

namespace {

LinearConstraintSystem dense_system(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  LinearConstraintSystem s;
  s.a = a.sparseView();
  s.b = b;
  s.row_node.resize(static_cast<std::size_t>(a.rows()));
  return s;
}

scenario::ScenarioConfig small_config(std::size_t samples) {
  auto cfg = testing::desk_config();
  for (auto& s : cfg.splits) s.samples = samples;
  return cfg;
}

const scenario::Dataset& train_set() {
  static const auto ds = scenario::generate_dataset(testing::case118(), small_config(30), "train", {.jobs = 1});
  return ds;
}
const scenario::Dataset& ood_set() {
  static const auto ds = scenario::generate_dataset(testing::case118(), small_config(20), "test_ood", {.jobs = 1});
  return ds;
}

}  // namespace

TEST_CASE("projection onto x1 + x2 = 0") {
  Eigen::MatrixXd a(1, 2);
  a << 1.0, 1.0;
  const auto sys = dense_system(a, Eigen::VectorXd::Zero(1));
  const auto y = kkt_project(Eigen::Vector2d(1.0, 1.0), sys);
  CHECK(y[0] == doctest::Approx(0.0));
  CHECK(y[1] == doctest::Approx(0.0));
  const auto z = kkt_project(Eigen::Vector2d(3.0, 1.0), sys);
  CHECK(z[0] == doctest::Approx(1.0));
  CHECK(z[1] == doctest::Approx(-1.0));
  CHECK_THROWS_AS(kkt_project(Eigen::Vector3d(1.0, 1.0, 1.0), sys), ValidationError);

  Eigen::MatrixXd dup(2, 2);
  dup << 1.0, 1.0, 2.0, 2.0;  // rank one
  CHECK_THROWS_AS(kkt_project(Eigen::Vector2d(1.0, 0.0), dense_system(dup, Eigen::VectorXd::Zero(2))), ValidationError);
}

TEST_CASE("projection property: feasible, idempotent and closest") {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const int m = 2 + trial % 4, n = m + 3 + trial % 5;
    Eigen::MatrixXd a(m, n);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = g(rng);
    Eigen::VectorXd b(m), y(n);
    for (int i = 0; i < m; ++i) b[i] = g(rng);
    for (int j = 0; j < n; ++j) y[j] = 5.0 * g(rng);
    const auto sys = dense_system(a, b);
    const Eigen::VectorXd p = kkt_project(y, sys);
    CHECK((a * p - b).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((kkt_project(p, sys) - p).cwiseAbs().maxCoeff() < 1e-10);

    // No feasible point is closer: feasible = p + kernel combination.
    const Eigen::MatrixXd kernel = a.fullPivLu().kernel();
    const double best = (y - p).norm();
    for (int k = 0; k < 1000; ++k) {
      Eigen::VectorXd c(kernel.cols());
      for (Eigen::Index i = 0; i < c.size(); ++i) c[i] = g(rng);
      const Eigen::VectorXd f = p + kernel * c;
      CHECK((y - f).norm() >= best - 1e-9);
    }
  }
}

TEST_CASE("conservation rows follow the node map") {
  const auto& c = testing::case14();
  const auto topo = grid::Topology::reference(c);
  const auto inj = powerflow::Injections::nominal(c);
  const auto sys = build_conservation_constraints(c, topo, inj);
  CHECK(sys.dimension() == static_cast<Eigen::Index>(2 * c.line_count()));
  CHECK(sys.a.rows() == 14);
  // Each line end appears in exactly one row.
  const Eigen::MatrixXd dense = Eigen::MatrixXd(sys.a);
  for (Eigen::Index j = 0; j < dense.cols(); ++j) CHECK(dense.col(j).sum() == 1.0);
  // The right-hand side sums to production minus load.
  double prod = 0.0, load = 0.0;
  for (double p : inj.prod_p) prod += p;
  for (double p : inj.load_p) load += p;
  CHECK(sys.b.sum() == doctest::Approx(prod - load));

  auto bad = inj;
  bad.load_p.pop_back();
  CHECK_THROWS_AS(build_conservation_constraints(c, topo, bad), ValidationError);
  auto islanded = topo;
  islanded.busbar[0] = 2;
  CHECK_THROWS_AS(build_conservation_constraints(c, islanded, inj), ValidationError);
}

TEST_CASE("flatten and unflatten are inverse") {
  powerflow::LineFlows f;
  f.resize(3);
  f.p_or = {1.0, 2.0, 3.0};
  f.p_ex = {-1.0, -2.5, -3.5};
  f.a_or = {7.0, 8.0, 9.0};
  const auto y = flatten_active_power(f);
  CHECK(y.size() == 6);
  CHECK(y[4] == -2.5);
  powerflow::LineFlows g = f;
  unflatten_active_power(2.0 * y, g);
  CHECK(g.p_or[2] == 6.0);
  CHECK(g.p_ex[0] == -2.0);
  CHECK(g.a_or == f.a_or);
}

TEST_CASE("hard-zero mask clears disconnected lines only") {
  powerflow::LineFlows f;
  f.resize(3);
  for (auto* v : {&f.a_or, &f.a_ex, &f.p_or, &f.p_ex, &f.q_or, &f.q_ex, &f.v_or}) *v = {1.0, 2.0, 3.0};
  grid::Topology t;
  t.line_status = {1, 0, 1};
  apply_hard_zero_mask(f, t);
  CHECK(f.a_or == std::vector<double>{1.0, 0.0, 3.0});
  CHECK(f.p_ex == std::vector<double>{1.0, 0.0, 3.0});
  CHECK(f.q_or == std::vector<double>{1.0, 0.0, 3.0});
  CHECK(f.v_or == std::vector<double>{1.0, 2.0, 3.0});
}

TEST_CASE("dc baseline predicts sensible flows") {
  const auto& c = testing::case118();
  DcBaseline model(c);
  CHECK(model.name() == "dc_baseline");
  model.fit(train_set());
  CHECK(model.mean_v_or().size() == c.line_count());
  const auto& test = ood_set();
  const auto pred = model.predict(test.samples);
  REQUIRE(pred.size() == test.size());
  for (std::size_t i = 0; i < test.size(); ++i) {
    const auto& f = pred.samples[i];
    for (std::size_t l = 0; l < c.line_count(); ++l) {
      if (!test.samples[i].topology.connected(l)) {
        CHECK(f.a_or[l] == 0.0);
        CHECK(f.p_or[l] == 0.0);
        continue;
      }
      CHECK(f.p_ex[l] == -f.p_or[l]);
      CHECK(f.a_or[l] >= 0.0);
      CHECK(f.v_or[l] > 0.0);
    }
  }
}

TEST_CASE("hard constraints enforce nodal balance on the baseline") {
  const auto& c = testing::case118();
  DcBaseline inner(c);
  inner.fit(train_set());
  HardConstrainedSimulator model(c, inner, 2);
  CHECK(model.name() == "dc_baseline+kkt");
  const auto& test = ood_set();
  const auto pred = model.predict(test.samples);
  const auto truth_like = [&] {
    scenario::Dataset d = test;
    return d;
  }();
  const auto report = metrics::evaluate_physics(c, pred, truth_like);
  CHECK(report.p[6] < 1e-9);  // nodal conservation
  CHECK(report.p[3] == 0.0);  // disconnected lines stay zero

  const auto raw = inner.predict(test.samples);
  KktProjector projector(c);
  const auto r = enforce_hard_constraints(c, raw, test.samples, 1, 1e-8, &projector);
  CHECK(r.max_residual < 1e-8);
  CHECK(projector.cached_topologies() >= 1);
  CHECK(projector.cached_topologies() <= test.size());
  for (std::size_t i = 0; i < test.size(); ++i) CHECK(r.predictions.samples[i].p_or == pred.samples[i].p_or);

  // A second pass reuses every cached factorization.
  const auto before = projector.cached_topologies();
  enforce_hard_constraints(c, raw, test.samples, 1, 1e-8, &projector);
  CHECK(projector.cached_topologies() == before);

  CHECK_THROWS_AS(enforce_hard_constraints(c, raw, std::span(test.samples).first(3)), ValidationError);
}

TEST_CASE("timed predict chunks the inputs") {
  const auto& c = testing::case118();
  DcBaseline model(c);
  model.fit(train_set());
  InferenceTiming timing;
  const auto pred = timed_predict(model, ood_set().samples, 7, &timing);
  CHECK(pred.size() == ood_set().size());
  CHECK(timing.batches == 3);
  CHECK(timing.seconds >= 0.0);
  const auto direct = model.predict(ood_set().samples);
  CHECK(pred.samples[19].p_or == direct.samples[19].p_or);
  CHECK_THROWS_AS(timed_predict(model, ood_set().samples, 0), ValidationError);
}
