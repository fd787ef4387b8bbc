#include "gridbench/metrics/ml.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gridbench/error.hpp"

namespace gridbench::metrics {

namespace {

void check_lengths(std::span<const double> pred, std::span<const double> truth) {
  if (pred.size() != truth.size()) {
    throw ValidationError("prediction has " + std::to_string(pred.size()) + " entries, truth has " +
                          std::to_string(truth.size()));
  }
}

MapeDetail mape_over(std::span<const double> pred, std::span<const double> truth, double cutoff) {
  MapeDetail d;
  double sum = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const double t = std::abs(truth[i]);
    if (t < cutoff) continue;
    if (t == 0.0) {
      ++d.excluded_zero;
      continue;
    }
    sum += std::abs(pred[i] - truth[i]) / t;
    ++d.used;
  }
  if (d.used == 0) throw ValidationError("MAPE selection is empty");
  d.value = sum / static_cast<double>(d.used);
  return d;
}

}  // namespace

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw ValidationError("quantile of an empty set");
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("quantile level must lie in [0, 1]");
  const double pos = p * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(lo), values.end());
  const double a = values[lo];
  double b = a;
  if (hi != lo) b = *std::min_element(values.begin() + static_cast<std::ptrdiff_t>(hi), values.end());
  return a + (pos - static_cast<double>(lo)) * (b - a);
}

MapeDetail mape_detail(std::span<const double> pred, std::span<const double> truth) {
  check_lengths(pred, truth);
  return mape_over(pred, truth, 0.0);
}

double mape(std::span<const double> pred, std::span<const double> truth) { return mape_detail(pred, truth).value; }

MapeDetail mape_top_quantile_detail(std::span<const double> pred, std::span<const double> truth, double q) {
  check_lengths(pred, truth);
  if (!(q > 0.0 && q <= 1.0)) throw ValidationError("quantile fraction must lie in (0, 1]");
  if (truth.empty()) throw ValidationError("MAPE selection is empty");
  std::vector<double> mags(truth.size());
  for (std::size_t i = 0; i < truth.size(); ++i) mags[i] = std::abs(truth[i]);
  return mape_over(pred, truth, quantile(std::move(mags), 1.0 - q));
}

double mape_top_quantile(std::span<const double> pred, std::span<const double> truth, double q) {
  return mape_top_quantile_detail(pred, truth, q).value;
}

double mae(std::span<const double> pred, std::span<const double> truth) {
  check_lengths(pred, truth);
  if (truth.empty()) throw ValidationError("MAE of an empty set");
  double sum = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) sum += std::abs(pred[i] - truth[i]);
  return sum / static_cast<double>(truth.size());
}

std::vector<double> MLReport::values() const {
  return {mape90_a_or, mape90_a_ex, mape10_p_or, mape10_p_ex, mae_v_or, mae_v_ex};
}

MLReport evaluate_ml(const PredictionSet& pred, const scenario::Dataset& truth) {
  if (pred.size() != truth.size()) {
    throw ValidationError("prediction set has " + std::to_string(pred.size()) + " samples, dataset has " +
                          std::to_string(truth.size()));
  }
  if (truth.size() == 0) throw ValidationError("cannot evaluate an empty dataset");
  const std::size_t L = truth.samples.front().flows.size();
  auto flatten = [&](auto member_pred, auto member_truth, std::vector<double>& p, std::vector<double>& t,
                     const char* name) {
    p.clear();
    t.clear();
    p.reserve(truth.size() * L);
    t.reserve(truth.size() * L);
    for (std::size_t i = 0; i < truth.size(); ++i) {
      const auto& pv = pred.samples[i].*member_pred;
      const auto& tv = truth.samples[i].flows.*member_truth;
      if (pv.size() != L || tv.size() != L) {
        throw ValidationError(std::string("sample ") + std::to_string(i) + ": " + name + " has the wrong length");
      }
      p.insert(p.end(), pv.begin(), pv.end());
      t.insert(t.end(), tv.begin(), tv.end());
    }
  };
  using F = powerflow::LineFlows;
  MLReport r;
  std::vector<double> p, t;
  auto top = [&](auto member, const char* name, double q) {
    flatten(member, member, p, t, name);
    const auto d = mape_top_quantile_detail(p, t, q);
    r.excluded_zero += d.excluded_zero;
    return d.value;
  };
  r.mape90_a_or = top(&F::a_or, "a_or", 0.1);
  r.mape90_a_ex = top(&F::a_ex, "a_ex", 0.1);
  r.mape10_p_or = top(&F::p_or, "p_or", 0.9);
  r.mape10_p_ex = top(&F::p_ex, "p_ex", 0.9);
  flatten(&F::v_or, &F::v_or, p, t, "v_or");
  r.mae_v_or = mae(p, t);
  flatten(&F::v_ex, &F::v_ex, p, t, "v_ex");
  r.mae_v_ex = mae(p, t);
  return r;
}

}  // namespace gridbench::metrics
