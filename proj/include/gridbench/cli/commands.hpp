#pragma once

#include <cstddef>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gridbench/scenario/config.hpp"
#include "gridbench/scoring/scoring.hpp"

namespace gridbench::cli {

namespace fs = std::filesystem;

/// Process exit codes.
enum class ExitCode : int {
  Ok = 0,
  Failure = 1,      // anything not listed below
  Validation = 2,   // bad configuration, case, topology or shapes
  Convergence = 3,  // a power flow did not converge
  Io = 4,           // missing or unwritable files
};

ExitCode exit_code_for(const std::exception& e);

/// Provenance record written once per output directory.
struct RunManifest {
  std::string command;
  std::string config_path;
  std::string config_hash;
  std::string case_path;
  std::string case_hash;
  std::vector<std::pair<std::string, std::uint64_t>> seeds;
  std::string started_at;  // UTC, ISO 8601
  std::string finished_at;
  std::vector<std::pair<std::string, double>> phases;  // wall-clock seconds
  std::string tool_version = GRIDBENCH_VERSION;

  std::string to_json() const;
  void write(const fs::path& dir) const;  // dir / run_manifest.json
};

std::string utc_now();

/// Wall-clock measurement of one engine over a sample set.
struct Timing {
  std::string engine;
  std::size_t samples = 0;
  double seconds = 0.0;         // timed pass
  double warmup_seconds = 0.0;  // excluded from `seconds`
  std::size_t jobs = 1;

  double per_sample() const;
};

std::string timing_json(const Timing& t);
Timing read_timing(const fs::path& path);
void write_timing(const fs::path& path, const Timing& t);

/// Replaces every split's seeds: env seeds base, base+1, ... and actor seeds
/// base+4, base+5, ... in train, val, test, test_ood order (base 1 gives the
/// default seeds).
void override_seeds(scenario::ScenarioConfig& cfg, std::uint64_t base);

struct GenerateArgs {
  fs::path config;
  fs::path case_path;
  fs::path out;
  std::size_t jobs = 0;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> samples;
  std::vector<std::string> splits;  // empty: all four
  bool physics = false;
};

int cmd_generate(const GenerateArgs& args, std::ostream& log);

enum class Engine { Sequential, Batched };

struct SolveArgs {
  fs::path case_path;
  bool n1_all = false;
  std::optional<fs::path> scenarios;  // JSON scenario list
  std::optional<fs::path> dataset;    // solve the inputs of a dataset split
  Engine engine = Engine::Batched;
  std::string linear = "direct";      // batched engine: direct | pcg
  std::string init = "";              // flat | dc; empty picks the engine default
  std::size_t jobs = 0;
  fs::path out;
  bool warmup = true;
};

/// Exit code: Ok when every scenario converged, Convergence when any failed
/// to converge, Validation when the only failures are invalid topologies.
int cmd_solve(const SolveArgs& args, std::ostream& log);

struct PredictArgs {
  fs::path case_path;
  fs::path truth;  // dataset root with train/ and the evaluated splits
  fs::path out;
  std::vector<std::string> splits = {"test", "test_ood"};
  bool kkt = false;
  std::size_t batch_size = 1024;
  std::size_t jobs = 0;
};

/// Fits the DC baseline on truth/train and writes out/<split>/ predictions
/// plus out/timing.json (inference time of the first split).
int cmd_predict(const PredictArgs& args, std::ostream& log);

struct ScoreArgs {
  fs::path case_path;
  fs::path truth;  // contains test/ and test_ood/
  fs::path pred;   // same layout
  std::optional<double> speedup;
  std::optional<fs::path> baseline_timing;
  std::optional<fs::path> inference_timing;
  std::optional<fs::path> weights;
  std::optional<fs::path> out;
  std::size_t jobs = 0;
};

scoring::ScoreWeights load_weights(const fs::path& path);

int cmd_score(const ScoreArgs& args, std::ostream& out);

struct RepeatArgs {
  fs::path case_path;
  fs::path truth;
  std::size_t times = 10;
  bool kkt = false;
  std::size_t batch_size = 1024;
  std::size_t jobs = 0;
  std::optional<fs::path> weights;
  std::optional<fs::path> out;
  std::optional<double> budget;  // seconds for the whole run
};

struct RepeatReport {
  std::vector<scoring::ScoreReport> runs;
  scoring::MeanStd global;
  scoring::MeanStd speedup_ratio;
};

/// Re-times the sequential reference solver and the DC baseline on the test
/// split N times and scores each run.
RepeatReport run_repeat(const RepeatArgs& args, std::ostream& log);
int cmd_repeat(const RepeatArgs& args, std::ostream& out);

}  // namespace gridbench::cli
