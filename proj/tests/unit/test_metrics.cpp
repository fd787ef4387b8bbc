#include <doctest.h>

#include <random>

#include "gridbench/error.hpp"
#include "gridbench/metrics/ml.hpp"
#include "gridbench/metrics/physics.hpp"
#include "gridbench/powerflow/newton.hpp"
#include "gridbench/scenario/dataset_io.hpp"
#include "support.hpp"

using namespace gridbench;
using namespace gridbench::metrics;

namespace {

// Two substations joined by two parallel lines; line 1 may be switched off.
grid::GridCase parallel_case() {
  grid::CaseData d;
  d.substations = {{1, "a", 138.0}, {2, "b", 138.0}};
  d.lines = {{0, 0, 1, 0.02, 0.1, 0.0, 1.0}, {1, 0, 1, 0.03, 0.15, 0.0, 1.0}};
  d.generators = {{0, 0, 0.0, 138.0, true}};
  d.loads = {{0, 1, 80.0, 20.0}};
  return grid::GridCase::create(d);
}

scenario::Dataset solved(const grid::GridCase& c, std::vector<grid::Topology> topos) {
  scenario::Dataset ds;
  for (auto& t : topos) {
    scenario::Sample s;
    s.injections = powerflow::Injections::nominal(c);
    s.topology = t;
    const auto sol = powerflow::solve_newton_raphson(c, t, s.injections);
    s.injections.prod_p = sol.prod_p;
    s.flows = sol.lines;
    ds.samples.push_back(s);
  }
  return ds;
}

}  // namespace

TEST_CASE("quantile matches the order-statistic oracle") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> v(1 + trial * 3);
    for (auto& x : v) x = u(rng);
    for (double p : {0.0, 0.1, 0.5, 0.9, 1.0}) CHECK(quantile(v, p) == testing::oracle_quantile(v, p));
  }
  CHECK(quantile({1.0, 2.0, 3.0, 4.0}, 0.5) == 2.5);
  CHECK_THROWS_AS(quantile({}, 0.5), ValidationError);
}

TEST_CASE("mape variants against brute-force oracles") {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> u(-100.0, 100.0), noise(0.9, 1.1);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<double> truth(20 + trial * 7), pred;
    for (auto& t : truth) t = trial % 4 == 0 && u(rng) > 60.0 ? 0.0 : u(rng);
    for (double t : truth) pred.push_back(t * noise(rng) + (t == 0.0 ? 1.0 : 0.0));
    CHECK(mape_top_quantile(pred, truth, 0.1) == doctest::Approx(testing::oracle_mape_top(pred, truth, 0.1)).epsilon(1e-13));
    CHECK(mape_top_quantile(pred, truth, 0.9) == doctest::Approx(testing::oracle_mape_top(pred, truth, 0.9)).epsilon(1e-13));
    CHECK(mae(pred, truth) == doctest::Approx(testing::oracle_mae(pred, truth)).epsilon(1e-13));
    // The full-range mape equals the top-100% variant.
    CHECK(mape(pred, truth) == doctest::Approx(testing::oracle_mape_top(pred, truth, 1.0)).epsilon(1e-13));
  }
}

TEST_CASE("mape skips zero truth and rejects empty selections") {
  const std::vector<double> truth{0.0, 2.0, 4.0}, pred{5.0, 3.0, 4.0};
  const auto d = mape_detail(pred, truth);
  CHECK(d.used == 2);
  CHECK(d.excluded_zero == 1);
  CHECK(d.value == doctest::Approx(0.25));
  const std::vector<double> zeros{0.0, 0.0}, any{1.0, 1.0};
  CHECK_THROWS_AS(mape_top_quantile(any, zeros, 0.1), ValidationError);
  const std::vector<double> shorter{1.0};
  CHECK_THROWS_AS(mae(shorter, truth), ValidationError);
}

TEST_CASE("evaluate_ml flattens samples before taking quantiles") {
  const auto c = parallel_case();
  const auto ref = grid::Topology::reference(c);
  auto ds = solved(c, {ref, ref});
  ds.samples[1].injections.load_p[0] = 40.0;  // only the truth arrays matter here
  auto pred = PredictionSet{};
  std::vector<double> flat_t, flat_p;
  for (auto& s : ds.samples) {
    auto f = s.flows;
    for (auto& a : f.a_or) a *= 1.05;
    for (auto& v : f.v_ex) v += 0.5;
    pred.samples.push_back(f);
    for (std::size_t l = 0; l < f.a_or.size(); ++l) flat_t.push_back(s.flows.a_or[l]), flat_p.push_back(f.a_or[l]);
  }
  const auto r = evaluate_ml(pred, ds);
  CHECK(r.mape90_a_or == doctest::Approx(testing::oracle_mape_top(flat_p, flat_t, 0.1)));
  CHECK(r.mape90_a_or == doctest::Approx(0.05));
  CHECK(r.mape90_a_ex == 0.0);
  CHECK(r.mae_v_ex == doctest::Approx(0.5));
  CHECK(r.mae_v_or == 0.0);
  CHECK(r.values().size() == 6);

  pred.samples.pop_back();
  CHECK_THROWS_AS(evaluate_ml(pred, ds), ValidationError);
}

TEST_CASE("physics metrics vanish on solved truth") {
  const auto c = parallel_case();
  auto cut = grid::Topology::reference(c);
  cut.line_status[1] = 0;
  const auto ds = solved(c, {grid::Topology::reference(c), cut});
  const auto r = evaluate_physics(c, scenario::as_predictions(ds), ds);
  for (int k = 0; k < 5; ++k) CHECK(r.p[static_cast<std::size_t>(k)] == 0.0);
  // Newton stops at 1e-6 MW of mismatch against about 1 MW of losses.
  CHECK(r.p[5] < 1e-5);
  CHECK(r.p[6] < 1e-7);
  // No charging and no tap: R times the mean current squared is exact.
  CHECK(r.p[7] < 1e-5);
  CHECK(r.disconnected_entries == 1);
}

TEST_CASE("each physics check reacts to its own defect") {
  const auto c = parallel_case();
  auto cut = grid::Topology::reference(c);
  cut.line_status[1] = 0;
  const auto ds = solved(c, {grid::Topology::reference(c), cut});
  const auto base = scenario::as_predictions(ds);

  auto p = base;
  p.samples[0].a_or[0] = -1.0;
  CHECK(evaluate_physics(c, p, ds).p[0] == doctest::Approx(1.0 / 8.0));

  p = base;
  p.samples[1].v_ex[0] = -1.0;
  p.samples[1].v_or[0] = -1.0;
  CHECK(evaluate_physics(c, p, ds).p[1] == doctest::Approx(2.0 / 8.0));

  p = base;
  p.samples[0].p_ex[1] = -p.samples[0].p_or[1] - 1.0;
  CHECK(evaluate_physics(c, p, ds).p[2] == doctest::Approx(1.0 / 4.0));

  p = base;
  p.samples[1].q_or[1] = 0.5;
  CHECK(evaluate_physics(c, p, ds).p[3] == 1.0);
  p.samples[1].q_or[1] = 1e-9;  // below the non-null threshold
  CHECK(evaluate_physics(c, p, ds).p[3] == 0.0);

  // Losses at 10% of production leave the plausible range.
  p = base;
  const double prod = ds.samples[0].injections.prod_p[0];
  p.samples[0].p_ex[0] = -p.samples[0].p_or[0] + 0.1 * prod;
  const auto r = evaluate_physics(c, p, ds);
  CHECK(r.p[4] == doctest::Approx(0.5));
  CHECK(r.p[5] > 0.0);
  CHECK(r.p[6] > 0.0);
  CHECK(r.gc_violation == doctest::Approx(0.5));
}

TEST_CASE("global conservation oracle on shifted flows") {
  // Shifting p_ex of one line by d MW changes losses by d.
  const auto c = parallel_case();
  const auto ds = solved(c, {grid::Topology::reference(c)});
  auto p = scenario::as_predictions(ds);
  const double d = 0.37;
  p.samples[0].p_ex[0] += d;
  const auto& inj = ds.samples[0].injections;
  const auto& f = p.samples[0];
  const double losses = f.p_or[0] + f.p_ex[0] + f.p_or[1] + f.p_ex[1];
  const double expected =
      std::abs(inj.prod_p[0] - inj.load_p[0] - losses) / std::max(std::abs(inj.prod_p[0] - inj.load_p[0]), 0.1);
  CHECK(expected == doctest::Approx(d / (inj.prod_p[0] - inj.load_p[0])).epsilon(1e-4));
  CHECK(evaluate_physics(c, p, ds).p[5] == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("nodal balance of a sample") {
  const auto c = parallel_case();
  const auto ds = solved(c, {grid::Topology::reference(c)});
  const auto b = sample_balance(c, ds.samples[0], ds.samples[0].flows);
  CHECK(b.load == 80.0);
  REQUIRE(b.node_injection.size() == 2);
  CHECK(b.node_injection[1] == -80.0);
  for (std::size_t k = 0; k < 2; ++k) CHECK(b.node_flow[k] == doctest::Approx(b.node_injection[k]).epsilon(1e-7));
}

TEST_CASE("unsquared joule form differs from the squared one") {
  const auto c = parallel_case();
  const auto ds = solved(c, {grid::Topology::reference(c)});
  PhysicsTolerances tol;
  tol.joule = JouleForm::Unsquared;
  CHECK(evaluate_physics(c, scenario::as_predictions(ds), ds, tol).p[7] > 0.1);
  scenario::Dataset empty;
  CHECK_THROWS_AS(evaluate_physics(c, {}, empty), ValidationError);
}
