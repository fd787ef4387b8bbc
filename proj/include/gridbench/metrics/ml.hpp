#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gridbench/metrics/prediction.hpp"
#include "gridbench/scenario/dataset.hpp"

namespace gridbench::metrics {

/// Linear-interpolation quantile (the usual "linear" method): position
/// p * (n - 1) in the sorted values.
double quantile(std::vector<double> values, double p);

struct MapeDetail {
  double value = 0.0;
  std::size_t used = 0;
  std::size_t excluded_zero = 0;  // selected entries with zero truth
};

/// Mean of |pred - truth| / |truth| over nonzero truth entries.
double mape(std::span<const double> pred, std::span<const double> truth);
MapeDetail mape_detail(std::span<const double> pred, std::span<const double> truth);

/// MAPE restricted to entries with |truth| >= the (1 - q) quantile of
/// |truth|: q = 0.1 keeps the top 10% (MAPE90), q = 0.9 the top 90%
/// (MAPE10). Throws ValidationError on an empty selection.
double mape_top_quantile(std::span<const double> pred, std::span<const double> truth, double q);
MapeDetail mape_top_quantile_detail(std::span<const double> pred, std::span<const double> truth, double q);

double mae(std::span<const double> pred, std::span<const double> truth);

/// Dimensionless MAPE ratios and MAE in kV.
struct MLReport {
  double mape90_a_or = 0.0;
  double mape90_a_ex = 0.0;
  double mape10_p_or = 0.0;
  double mape10_p_ex = 0.0;
  double mae_v_or = 0.0;
  double mae_v_ex = 0.0;
  std::size_t excluded_zero = 0;

  /// In grading order: a_or, a_ex, p_or, p_ex, v_or, v_ex.
  std::vector<double> values() const;
};

inline const std::vector<const char*> kMlMetricNames = {"MAPE90(a_or)", "MAPE90(a_ex)", "MAPE10(p_or)",
                                                        "MAPE10(p_ex)", "MAE(v_or)",    "MAE(v_ex)"};

/// Quantiles are taken per quantity over the flattened (sample x line)
/// truth array.
MLReport evaluate_ml(const PredictionSet& pred, const scenario::Dataset& truth);

}  // namespace gridbench::metrics
