#pragma once

#include <string>
#include <string_view>

#include "gridbench/metrics/ml.hpp"
#include "gridbench/metrics/physics.hpp"
#include "gridbench/scoring/scoring.hpp"

namespace gridbench::scoring {

std::string ml_report_json(const metrics::MLReport& r);
std::string physics_report_json(const metrics::PhysicsReport& r);

/// Machine-readable report. Doubles are written in shortest round-trip form,
/// so parse_score_report(score_report_json(r)) recomputes bit-identically.
std::string score_report_json(const ScoreReport& r);
ScoreReport parse_score_report(std::string_view json_text);

/// Human-readable rendering: one grade letter per metric (G great,
/// A acceptable, U unacceptable), the sub-scores and the global percentage.
std::string render_score_table(const ScoreReport& r);

/// "mean ± std" over repeated runs, as a percentage with one decimal.
std::string render_mean_std(const MeanStd& m);

}  // namespace gridbench::scoring
