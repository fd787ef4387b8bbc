#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "gridbench/grid/case.hpp"
#include "gridbench/metrics/prediction.hpp"
#include "gridbench/scenario/dataset.hpp"

namespace gridbench::scenario {

/// Output quantities stored per line, in file order.
inline const std::vector<std::string> kLineQuantities = {"a_or", "a_ex", "p_or",     "p_ex",    "q_or", "q_ex",
                                                         "v_or", "v_ex", "theta_or", "theta_ex"};
/// Quantities a prediction directory must provide.
inline const std::vector<std::string> kRequiredPredictions = {"a_or", "a_ex", "p_or", "p_ex", "v_or", "v_ex"};

/// Writes one split as a directory of CSV files (one row per sample) plus
/// manifest.json. Numbers use the shortest round-trip form, so writing the
/// same dataset twice gives identical bytes.
void write_dataset(const std::filesystem::path& dir, const grid::GridCase& grid_case, const Dataset& dataset);

/// Reads a directory written by write_dataset (physics sidecars are not
/// loaded). Throws IoError / ParseError / ValidationError.
Dataset read_dataset(const std::filesystem::path& dir, const grid::GridCase& grid_case);

/// Prediction files use the same per-quantity layout as dataset outputs.
void write_predictions(const std::filesystem::path& dir, const grid::GridCase& grid_case,
                       const metrics::PredictionSet& pred, const std::string& manifest_json);

/// Reads prediction files; q and theta files are optional.
metrics::PredictionSet read_predictions(const std::filesystem::path& dir, const grid::GridCase& grid_case);

/// Dataset outputs as a prediction set (the truth-as-prediction case).
metrics::PredictionSet as_predictions(const Dataset& dataset);

}  // namespace gridbench::scenario
