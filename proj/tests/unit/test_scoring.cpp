#include <doctest.h>

#include <cmath>
#include <random>

#include "gridbench/error.hpp"
#include "gridbench/scoring/report_io.hpp"
#include "gridbench/scoring/scoring.hpp"

using namespace gridbench;
using namespace gridbench::scoring;
using G = Grade;

namespace {

double oracle_speedup(double ratio) {
  const double a = 5.0 / std::pow(-std::log(0.9), 1.0 / 1.7);
  return std::min(1.0 - std::exp(-std::pow(ratio / a, 1.7)), 1.0);
}

const std::vector<G> kMlTest = {G::Great, G::Great, G::Acceptable, G::Acceptable, G::Unacceptable, G::Unacceptable};
const std::vector<G> kMlOod = {G::Acceptable, G::Acceptable, G::Acceptable, G::Acceptable, G::Unacceptable,
                               G::Unacceptable};
const std::vector<G> kPhys = {G::Great,        G::Great,        G::Acceptable,   G::Unacceptable,
                              G::Unacceptable, G::Unacceptable, G::Unacceptable, G::Unacceptable};

}  // namespace

TEST_CASE("discretize boundaries are inclusive") {
  const Thresholds t{0.02, 0.05};
  CHECK(discretize(0.0, t) == G::Great);
  CHECK(discretize(0.02, t) == G::Great);
  CHECK(discretize(std::nextafter(0.02, 1.0), t) == G::Acceptable);
  CHECK(discretize(0.05, t) == G::Acceptable);
  CHECK(discretize(std::nextafter(0.05, 1.0), t) == G::Unacceptable);
  CHECK(discretize(1e9, t) == G::Unacceptable);
  CHECK_THROWS_AS(discretize(-0.1, t), ValidationError);
  CHECK_THROWS_AS(discretize(0.1, Thresholds{0.05, 0.02}), ValidationError);
  CHECK_THROWS_AS(discretize(std::nan(""), t), ValidationError);
}

TEST_CASE("subscore counts two points per great") {
  const std::vector<G> all_great(6, G::Great), mixed = {G::Great, G::Acceptable, G::Unacceptable};
  CHECK(subscore(all_great) == 1.0);
  CHECK(subscore(mixed) == doctest::Approx(0.5));
  CHECK(subscore(kPhys) == doctest::Approx(5.0 / 16.0));
  CHECK_THROWS_AS(subscore(std::vector<G>{}), ValidationError);
}

TEST_CASE("weibull speed-up score") {
  const ScoreWeights w;
  CHECK(w.weibull_a() == doctest::Approx(18.787343).epsilon(1e-8));
  CHECK(std::trunc(w.weibull_a() * 100.0) / 100.0 == 18.78);
  CHECK(speedup_score(5.0) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(speedup_score(1e6) == 1.0);
  CHECK_THROWS_AS(speedup_score(0.0), ValidationError);
  CHECK_THROWS_AS(speedup_score(-2.0), ValidationError);
  // Monotone property over random ratios.
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.01, 100.0);
  for (int i = 0; i < 200; ++i) {
    const double a = u(rng), b = u(rng);
    CHECK(speedup_score(a) == doctest::Approx(oracle_speedup(a)).epsilon(1e-12));
    if (a < b) CHECK(speedup_score(a) <= speedup_score(b));
  }
  CHECK(measure_speedup(10.0, 2.0) == 5.0);
  CHECK_THROWS_AS(measure_speedup(1.0, 0.0), ValidationError);
}

TEST_CASE("global score of the all-great grid with a slow model") {
  const std::vector<G> ml(6, G::Great), ph(8, G::Great);
  const ScoreWeights w;
  const auto r = global_score(score_split(ml, ph, w), score_split(ml, ph, w), 3.77);
  CHECK(r.test.score == 1.0);
  CHECK(r.global == doctest::Approx(0.6 + 0.4 * oracle_speedup(3.77)).epsilon(1e-12));
  CHECK(r.global_percent() == doctest::Approx(62.52).epsilon(1e-4));
}

TEST_CASE("global score of mixed grades") {
  const ScoreWeights w;
  const auto r = global_score(score_split(kMlTest, kPhys, w), score_split(kMlOod, kPhys, w), 11.9);
  const double test = 0.66 * (6.0 / 12.0) + 0.34 * (5.0 / 16.0);
  const double ood = 0.66 * (4.0 / 12.0) + 0.34 * (5.0 / 16.0);
  CHECK(r.test.score == doctest::Approx(test).epsilon(1e-12));
  CHECK(r.ood.score == doctest::Approx(ood).epsilon(1e-12));
  CHECK(r.test.score == doctest::Approx(0.43625));
  CHECK(r.ood.score == doctest::Approx(0.32625));
  CHECK(r.global == doctest::Approx(0.3 * test + 0.3 * ood + 0.4 * oracle_speedup(11.9)).epsilon(1e-12));
  CHECK(r.global_percent() == doctest::Approx(37.63).epsilon(1e-3));
}

TEST_CASE("metric values go through the threshold table") {
  metrics::MLReport ml;
  ml.mape90_a_or = 0.01;
  ml.mape90_a_ex = 0.03;
  ml.mape10_p_or = 0.06;
  ml.mape10_p_ex = 0.0;
  ml.mae_v_or = 0.2;
  ml.mae_v_ex = 0.7;
  metrics::PhysicsReport ph;
  ph.p = {0.0, 0.0, 0.02, 0.0, 0.5, 0.07, 0.2, 0.0};
  const auto s = score_split(ml, ph, {}, ThresholdTable::standard());
  CHECK(s.ml_grades == std::vector<G>{G::Great, G::Acceptable, G::Unacceptable, G::Great, G::Great, G::Unacceptable});
  CHECK(s.physics_grades ==
        std::vector<G>{G::Great, G::Great, G::Acceptable, G::Great, G::Unacceptable, G::Acceptable, G::Unacceptable, G::Great});
  CHECK(s.ml_values == ml.values());
}

TEST_CASE("weights are validated") {
  ScoreWeights w;
  CHECK_NOTHROW(w.check());
  w.test = 0.5;
  CHECK_THROWS_AS(w.check(), ValidationError);
  w = {};
  w.ml = 0.7;
  CHECK_THROWS_AS(w.check(), ValidationError);
  w = {};
  w.weibull_b = 0.0;
  CHECK_THROWS_AS(w.check(), ValidationError);
  CHECK_THROWS_AS(score_split(std::vector<G>{}, kPhys, ScoreWeights{}), ValidationError);
}

TEST_CASE("score report json round-trips exactly") {
  const auto r = global_score(score_split(kMlTest, kPhys, {}), score_split(kMlOod, kPhys, {}), 11.9);
  const auto text = score_report_json(r);
  const auto back = parse_score_report(text);
  CHECK(back.global == r.global);
  CHECK(back.speedup == r.speedup);
  CHECK(back.test.ml_grades == r.test.ml_grades);
  CHECK(back.ood.physics_grades == r.ood.physics_grades);
  CHECK(score_report_json(back) == text);
  CHECK_THROWS(parse_score_report("{\"test\": 1}"));
  CHECK_THROWS(parse_score_report("not json"));
}

TEST_CASE("rendered table carries the grades and the global score") {
  const auto r = global_score(score_split(kMlTest, kPhys, {}), score_split(kMlOod, kPhys, {}), 11.9);
  const auto table = render_score_table(r);
  CHECK(table.find("G G A A U U") != std::string::npos);
  CHECK(table.find("37.6%") != std::string::npos);
  CHECK(render_mean_std({0.6252, 0.004}) == "62.5% ± 0.4");
}

TEST_CASE("mean and sample standard deviation") {
  const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  const auto m = mean_std(v);
  CHECK(m.mean == 2.5);
  CHECK(m.std == doctest::Approx(std::sqrt(5.0 / 3.0)));
  const std::vector<double> one{7.0};
  CHECK(mean_std(one).std == 0.0);
}
