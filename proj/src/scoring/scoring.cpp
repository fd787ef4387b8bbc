#include "gridbench/scoring/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gridbench/error.hpp"

namespace gridbench::scoring {

const char* to_string(Grade g) {
  switch (g) {
    case Grade::Great: return "great";
    case Grade::Acceptable: return "acceptable";
    case Grade::Unacceptable: return "unacceptable";
  }
  return "?";
}

ThresholdTable ThresholdTable::standard() {
  ThresholdTable t;
  t.ml = {{{0.02, 0.05}, {0.02, 0.05}, {0.02, 0.05}, {0.02, 0.05}, {0.2, 0.5}, {0.2, 0.5}}};
  t.physics = {{{0.01, 0.05},
                {0.01, 0.05},
                {0.01, 0.05},
                {0.01, 0.05},
                {0.01, 0.05},
                {0.05, 0.10},
                {0.05, 0.10},
                {0.01, 0.05}}};
  return t;
}

namespace {

void check_pair(Thresholds t) {
  if (!(t.inferior > 0.0 && t.inferior < t.superior && std::isfinite(t.superior))) {
    throw ValidationError("thresholds need 0 < inferior < superior");
  }
}

}  // namespace

void ThresholdTable::check() const {
  for (auto t : ml) check_pair(t);
  for (auto t : physics) check_pair(t);
}

Grade discretize(double value, Thresholds t) {
  check_pair(t);
  if (!(value >= 0.0)) throw ValidationError("metric values must be nonnegative");
  if (value <= t.inferior) return Grade::Great;
  if (value <= t.superior) return Grade::Acceptable;
  return Grade::Unacceptable;
}

double subscore(std::span<const Grade> grades) {
  if (grades.empty()) throw ValidationError("subscore needs at least one grade");
  int points = 0;
  for (Grade g : grades) points += static_cast<int>(g);
  return static_cast<double>(points) / (2.0 * static_cast<double>(grades.size()));
}

void ScoreWeights::check() const {
  for (double x : {test, ood, speedup, ml, physics}) {
    if (!(x >= 0.0 && x <= 1.0)) throw ValidationError("score weights must lie in [0, 1]");
  }
  if (std::abs(test + ood + speedup - 1.0) > 1e-12) throw ValidationError("test + ood + speedup weights must sum to 1");
  if (std::abs(ml + physics - 1.0) > 1e-12) throw ValidationError("ml + physics weights must sum to 1");
  if (!(weibull_b > 0.0 && weibull_c > 0.0)) throw ValidationError("Weibull parameters must be positive");
}

double ScoreWeights::weibull_a() const { return weibull_c * std::pow(-std::log(0.9), -1.0 / weibull_b); }

double speedup_score(double ratio, const ScoreWeights& w) {
  if (!(ratio > 0.0) || !std::isfinite(ratio)) throw ValidationError("speed-up ratio must be positive and finite");
  const double s = 1.0 - std::exp(-std::pow(ratio / w.weibull_a(), w.weibull_b));
  return std::clamp(s, 0.0, 1.0);
}

double measure_speedup(double baseline_seconds, double inference_seconds) {
  if (!(baseline_seconds > 0.0) || !(inference_seconds > 0.0)) throw ValidationError("timings must be positive");
  return baseline_seconds / inference_seconds;
}

SplitScore score_split(std::vector<Grade> ml_grades, std::vector<Grade> physics_grades, const ScoreWeights& w) {
  w.check();
  SplitScore s;
  s.ml_grades = std::move(ml_grades);
  s.physics_grades = std::move(physics_grades);
  s.ml = subscore(s.ml_grades);
  s.physics = subscore(s.physics_grades);
  s.score = w.ml * s.ml + w.physics * s.physics;
  return s;
}

SplitScore score_split(const metrics::MLReport& ml, const metrics::PhysicsReport& physics, const ScoreWeights& w,
                       const ThresholdTable& t) {
  t.check();
  const auto mv = ml.values();
  const auto pv = physics.values();
  std::vector<Grade> mg, pg;
  for (std::size_t i = 0; i < mv.size(); ++i) mg.push_back(discretize(mv[i], t.ml[i]));
  for (std::size_t i = 0; i < pv.size(); ++i) pg.push_back(discretize(pv[i], t.physics[i]));
  SplitScore s = score_split(std::move(mg), std::move(pg), w);
  s.ml_values = mv;
  s.physics_values = pv;
  return s;
}

ScoreReport global_score(SplitScore test, SplitScore ood, double speedup_ratio, const ScoreWeights& w) {
  w.check();
  ScoreReport r;
  r.weights = w;
  r.test = std::move(test);
  r.ood = std::move(ood);
  r.speedup_ratio = speedup_ratio;
  r.speedup = speedup_score(speedup_ratio, w);
  r.global = w.test * r.test.score + w.ood * r.ood.score + w.speedup * r.speedup;
  return r;
}

ScoreReport global_score(const metrics::MLReport& ml_test, const metrics::PhysicsReport& ph_test,
                         const metrics::MLReport& ml_ood, const metrics::PhysicsReport& ph_ood, double speedup_ratio,
                         const ScoreWeights& w, const ThresholdTable& t) {
  return global_score(score_split(ml_test, ph_test, w, t), score_split(ml_ood, ph_ood, w, t), speedup_ratio, w);
}

MeanStd mean_std(std::span<const double> values) {
  if (values.empty()) throw ValidationError("mean_std needs at least one value");
  MeanStd m;
  m.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - m.mean) * (v - m.mean);
    m.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return m;
}

}  // namespace gridbench::scoring
