#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "gridbench/metrics/ml.hpp"
#include "gridbench/metrics/physics.hpp"

namespace gridbench::scoring {

enum class Grade { Unacceptable = 0, Acceptable = 1, Great = 2 };

const char* to_string(Grade g);

struct Thresholds {
  double inferior = 0.0;
  double superior = 0.0;
};

/// ML thresholds in metric order a_or, a_ex, p_or, p_ex, v_or, v_ex (MAPE
/// as ratios, MAE in kV); physics thresholds for P1..P8 (ratios).
struct ThresholdTable {
  std::array<Thresholds, 6> ml;
  std::array<Thresholds, 8> physics;

  static ThresholdTable standard();
  void check() const;
};

/// value <= inferior: great; <= superior: acceptable; otherwise
/// unacceptable. Throws ValidationError for a negative value or invalid
/// thresholds.
Grade discretize(double value, Thresholds t);

/// (2 N_great + N_acceptable) / (2 N). Throws on an empty vector.
double subscore(std::span<const Grade> grades);

struct ScoreWeights {
  double test = 0.30;
  double ood = 0.30;
  double speedup = 0.40;
  double ml = 0.66;
  double physics = 0.34;
  double weibull_b = 1.7;
  double weibull_c = 5.0;

  void check() const;
  /// a = c * (-ln 0.9)^(-1/b): the ratio scoring 0.1 is c.
  double weibull_a() const;
};

/// min(1 - exp(-(ratio / a)^b), 1). Throws for ratio <= 0.
double speedup_score(double ratio, const ScoreWeights& w = {});

/// baseline_time / inference_time; both must be positive.
double measure_speedup(double baseline_seconds, double inference_seconds);

struct SplitScore {
  std::vector<Grade> ml_grades;
  std::vector<Grade> physics_grades;
  std::vector<double> ml_values;       // empty when built from grades
  std::vector<double> physics_values;
  double ml = 0.0;
  double physics = 0.0;
  double score = 0.0;
};

struct ScoreReport {
  SplitScore test;
  SplitScore ood;
  double speedup_ratio = 0.0;
  double speedup = 0.0;
  double global = 0.0;  // in [0, 1]
  ScoreWeights weights;

  double global_percent() const { return 100.0 * global; }
};

SplitScore score_split(const metrics::MLReport& ml, const metrics::PhysicsReport& physics, const ScoreWeights& w,
                       const ThresholdTable& t);
SplitScore score_split(std::vector<Grade> ml_grades, std::vector<Grade> physics_grades, const ScoreWeights& w);

ScoreReport global_score(const metrics::MLReport& ml_test, const metrics::PhysicsReport& ph_test,
                         const metrics::MLReport& ml_ood, const metrics::PhysicsReport& ph_ood, double speedup_ratio,
                         const ScoreWeights& w = {}, const ThresholdTable& t = ThresholdTable::standard());

/// Same pipeline starting from already discretized grade vectors.
ScoreReport global_score(SplitScore test, SplitScore ood, double speedup_ratio, const ScoreWeights& w = {});

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation, 0 for a single value
};

MeanStd mean_std(std::span<const double> values);

}  // namespace gridbench::scoring
