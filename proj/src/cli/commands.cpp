#include "gridbench/cli/commands.hpp"

#include <charconv>
#include <chrono>
#include <ctime>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "gridbench/cli/hashing.hpp"
#include "gridbench/contingency/batch.hpp"
#include "gridbench/error.hpp"
#include "gridbench/grid/case_io.hpp"
#include "gridbench/metrics/ml.hpp"
#include "gridbench/metrics/physics.hpp"
#include "gridbench/parallel.hpp"
#include "gridbench/powerflow/newton.hpp"
#include "gridbench/scenario/dataset.hpp"
#include "gridbench/scenario/dataset_io.hpp"
#include "gridbench/scoring/report_io.hpp"
#include "gridbench/surrogate/dc_baseline.hpp"
#include "gridbench/surrogate/mask.hpp"

namespace gridbench::cli {

using nlohmann::json;
using Clock = std::chrono::steady_clock;
using contingency::ScenarioOutcome;
using contingency::ScenarioStatus;

ExitCode exit_code_for(const std::exception& e) {
  if (dynamic_cast<const IoError*>(&e)) return ExitCode::Io;
  if (dynamic_cast<const ConvergenceError*>(&e)) return ExitCode::Convergence;
  if (dynamic_cast<const ValidationError*>(&e) || dynamic_cast<const ParseError*>(&e)) return ExitCode::Validation;
  return ExitCode::Failure;
}

namespace {

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

void append_number(std::string& out, double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, r.ptr);
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch;
  }
  return q + '"';
}

json parse_json_file(const fs::path& path) {
  const std::string text = read_text(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(e.what(), 0, path.string());
  }
}

}  // namespace

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string RunManifest::to_json() const {
  json j;
  j["kind"] = "run";
  j["command"] = command;
  j["config"] = {{"path", config_path}, {"sha256", config_hash}};
  j["case"] = {{"path", case_path}, {"sha256", case_hash}};
  json s = json::object();
  for (const auto& [k, v] : seeds) s[k] = v;
  j["seeds"] = s;
  j["started_at"] = started_at;
  j["finished_at"] = finished_at;
  json p = json::object();
  for (const auto& [k, v] : phases) p[k] = v;
  j["phases_seconds"] = p;
  j["tool_version"] = tool_version;
  return j.dump(2) + "\n";
}

void RunManifest::write(const fs::path& dir) const {
  make_dir(dir);
  write_text(dir / "run_manifest.json", to_json());
}

double Timing::per_sample() const {
  if (samples == 0 || !(seconds > 0.0)) throw ValidationError("timing record has no samples or no elapsed time");
  return seconds / static_cast<double>(samples);
}

std::string timing_json(const Timing& t) {
  json j;
  j["engine"] = t.engine;
  j["samples"] = t.samples;
  j["seconds"] = t.seconds;
  j["warmup_seconds"] = t.warmup_seconds;
  j["jobs"] = t.jobs;
  return j.dump(2) + "\n";
}

Timing read_timing(const fs::path& path) {
  const json j = parse_json_file(path);
  try {
    Timing t;
    t.engine = j.value("engine", std::string{});
    t.samples = j.at("samples").get<std::size_t>();
    t.seconds = j.at("seconds").get<double>();
    t.warmup_seconds = j.value("warmup_seconds", 0.0);
    t.jobs = j.value("jobs", std::size_t{1});
    return t;
  } catch (const json::exception& e) {
    throw ParseError(e.what(), 0, path.string());
  }
}

void write_timing(const fs::path& path, const Timing& t) { write_text(path, timing_json(t)); }

void override_seeds(scenario::ScenarioConfig& cfg, std::uint64_t base) {
  for (auto& s : cfg.splits) {
    for (std::size_t i = 0; i < scenario::kSplitNames.size(); ++i) {
      if (s.name != scenario::kSplitNames[i]) continue;
      s.env_seed = base + i;
      s.actor_seed = base + 4 + i;
    }
  }
}

// ---------------------------------------------------------------- generate

int cmd_generate(const GenerateArgs& args, std::ostream& log) {
  RunManifest man;
  man.command = "generate";
  man.started_at = utc_now();
  auto t0 = Clock::now();

  auto cfg = scenario::load_scenario_config(args.config);
  if (args.seed) override_seeds(cfg, *args.seed);
  if (args.physics) cfg.store_physics = true;
  cfg.check();
  const auto grid_case = grid::load_case(args.case_path);
  scenario::check_against_case(cfg, grid_case);

  man.config_path = args.config.string();
  man.config_hash = sha256_hex(scenario::to_canonical_json(cfg));
  man.case_path = args.case_path.string();
  man.case_hash = sha256_file(args.case_path);
  man.phases.emplace_back("load", seconds_since(t0));

  std::vector<std::string> splits = args.splits.empty() ? scenario::kSplitNames : args.splits;
  for (const auto& name : splits) (void)cfg.split(name);  // unknown names fail before any work

  make_dir(args.out);
  for (const auto& name : splits) {
    t0 = Clock::now();
    scenario::GenerateOptions opts;
    opts.jobs = args.jobs;
    opts.samples = args.samples;
    opts.config_hash = man.config_hash;
    opts.case_hash = man.case_hash;
    const auto ds = scenario::generate_dataset(grid_case, cfg, name, opts);
    scenario::write_dataset(args.out / name, grid_case, ds);
    man.seeds.emplace_back(name + ".env_seed", ds.env_seed);
    man.seeds.emplace_back(name + ".actor_seed", ds.actor_seed);
    man.phases.emplace_back(name, seconds_since(t0));
    log << name << ": " << ds.size() << " samples (" << ds.topology_redraws << " topology redraws, "
        << ds.solver_redraws << " solver redraws, " << ds.loss_redraws << " loss-ratio redraws)\n";
  }
  man.finished_at = utc_now();
  man.write(args.out);
  return static_cast<int>(ExitCode::Ok);
}

// ------------------------------------------------------------------- solve

namespace {

struct SolveInputs {
  std::vector<grid::Topology> topologies;
  std::vector<powerflow::Injections> injections;
};

SolveInputs read_scenario_file(const grid::GridCase& c, const fs::path& path) {
  const json j = parse_json_file(path);
  SolveInputs in;
  try {
    const json& list = j.is_array() ? j : j.at("scenarios");
    const auto nominal = powerflow::Injections::nominal(c);
    const auto reference = grid::Topology::reference(c);
    for (std::size_t i = 0; i < list.size(); ++i) {
      const json& s = list[i];
      grid::Topology t = reference;
      if (s.contains("set_bus")) {
        for (const auto& sb : s.at("set_bus")) {
          t = grid::apply_topology_action(
              c, t, grid::SetBus{sb.at(0).get<int>(), sb.at(1).get<std::vector<int>>()});
        }
      }
      if (s.contains("disconnect")) {
        for (const auto& id : s.at("disconnect")) t = grid::apply_topology_action(c, t, grid::DisconnectLine{id.get<int>()});
      }
      in.topologies.push_back(std::move(t));
      in.injections.push_back(nominal);
    }
  } catch (const json::exception& e) {
    throw ParseError(e.what(), 0, path.string());
  }
  return in;
}

std::vector<ScenarioOutcome> solve_sequential(const grid::GridCase& c, const SolveInputs& in,
                                              const powerflow::SolverOptions& opts) {
  std::vector<ScenarioOutcome> out(in.topologies.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto& o = out[i];
    const auto verdict = grid::validate_topology(c, in.topologies[i]);
    if (!verdict) {
      o.status = ScenarioStatus::InvalidTopology;
      o.message = verdict.reason;
      continue;
    }
    try {
      o.solution = powerflow::solve_newton_raphson(c, in.topologies[i], in.injections[i], opts);
      o.status = ScenarioStatus::Converged;
      o.final_mismatch = o.solution->mismatch_norm;
      o.direct_solves = o.solution->iterations;
    } catch (const ConvergenceError& e) {
      o.status = ScenarioStatus::NotConverged;
      o.message = e.what();
      o.final_mismatch = e.mismatch_norm();
    } catch (const Error& e) {
      o.status = ScenarioStatus::Failed;
      o.message = e.what();
    }
  }
  return out;
}

powerflow::Initializer parse_init(const std::string& s, Engine engine) {
  if (s.empty()) return engine == Engine::Sequential ? powerflow::Initializer::Flat : powerflow::Initializer::DcWarmStart;
  if (s == "flat") return powerflow::Initializer::Flat;
  if (s == "dc") return powerflow::Initializer::DcWarmStart;
  throw ValidationError("--init must be flat or dc, got " + s);
}

std::vector<ScenarioOutcome> run_engine(const grid::GridCase& c, const SolveInputs& in, Engine engine,
                                        const SolveArgs& args) {
  powerflow::SolverOptions opts;
  opts.initializer = parse_init(args.init, engine);
  if (engine == Engine::Sequential) return solve_sequential(c, in, opts);
  contingency::BatchOptions b;
  b.jobs = args.jobs;
  if (args.linear == "pcg") {
    b.linear_solver = contingency::LinearSolver::Pcg;
  } else if (args.linear != "direct") {
    throw ValidationError("--linear must be direct or pcg, got " + args.linear);
  }
  return contingency::batch_solve(c, in.topologies, in.injections, opts, b).outcomes;
}

void write_solutions(const fs::path& dir, const grid::GridCase& c, const std::vector<ScenarioOutcome>& outcomes) {
  std::string status = "scenario,status,iterations,mismatch,message\n";
  std::string lines = "scenario,line,a_or,a_ex,p_or,p_ex,q_or,q_ex,v_or,v_ex,theta_or,theta_ex\n";
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const auto& o = outcomes[i];
    status += std::to_string(i) + ',' + contingency::to_string(o.status) + ',' +
              std::to_string(o.solution ? o.solution->iterations : 0) + ',';
    append_number(status, o.final_mismatch);
    status += ',' + csv_quote(o.message) + '\n';
    if (!o.solution) continue;
    const auto& f = o.solution->lines;
    for (std::size_t l = 0; l < c.line_count(); ++l) {
      lines += std::to_string(i) + ',' + std::to_string(c.lines()[l].id);
      for (const auto* q : {&f.a_or, &f.a_ex, &f.p_or, &f.p_ex, &f.q_or, &f.q_ex, &f.v_or, &f.v_ex, &f.theta_or,
                            &f.theta_ex}) {
        lines += ',';
        append_number(lines, (*q)[l]);
      }
      lines += '\n';
    }
  }
  write_text(dir / "status.csv", status);
  write_text(dir / "lines.csv", lines);
}

const char* engine_name(Engine e) { return e == Engine::Sequential ? "sequential" : "batched"; }

}  // namespace

int cmd_solve(const SolveArgs& args, std::ostream& log) {
  const int sources = int(args.n1_all) + int(args.scenarios.has_value()) + int(args.dataset.has_value());
  if (sources != 1) throw ValidationError("solve needs exactly one of --n1-all, --scenarios, --dataset");
  RunManifest man;
  man.command = std::string("solve --engine ") + engine_name(args.engine);
  man.started_at = utc_now();
  auto t0 = Clock::now();

  const auto grid_case = grid::load_case(args.case_path);
  man.case_path = args.case_path.string();
  man.case_hash = sha256_file(args.case_path);

  SolveInputs in;
  if (args.n1_all) {
    in.topologies = contingency::n1_topologies(grid_case, grid::Topology::reference(grid_case));
    in.injections.assign(in.topologies.size(), powerflow::Injections::nominal(grid_case));
  } else if (args.scenarios) {
    man.config_path = args.scenarios->string();
    man.config_hash = sha256_file(*args.scenarios);
    in = read_scenario_file(grid_case, *args.scenarios);
  } else {
    const auto ds = scenario::read_dataset(*args.dataset, grid_case);
    man.config_path = args.dataset->string();
    man.config_hash = ds.config_hash;
    man.seeds = {{"env_seed", ds.env_seed}, {"actor_seed", ds.actor_seed}};
    for (const auto& s : ds.samples) {
      in.topologies.push_back(s.topology);
      in.injections.push_back(s.injections);
    }
  }
  man.phases.emplace_back("load", seconds_since(t0));

  if (in.topologies.empty()) {
    log << "warning: no scenarios to solve, nothing written\n";
    return static_cast<int>(ExitCode::Ok);
  }

  Timing timing;
  timing.engine = engine_name(args.engine);
  timing.samples = in.topologies.size();
  timing.jobs = args.engine == Engine::Sequential ? 1 : resolve_jobs(args.jobs);
  if (args.warmup) {
    t0 = Clock::now();
    (void)run_engine(grid_case, in, args.engine, args);
    timing.warmup_seconds = seconds_since(t0);
  }
  t0 = Clock::now();
  const auto outcomes = run_engine(grid_case, in, args.engine, args);
  timing.seconds = seconds_since(t0);
  man.phases.emplace_back("warmup", timing.warmup_seconds);
  man.phases.emplace_back("solve", timing.seconds);

  make_dir(args.out);
  write_solutions(args.out, grid_case, outcomes);
  write_timing(args.out / "timing.json", timing);

  std::size_t invalid = 0, failed = 0;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const auto& o = outcomes[i];
    if (o.status == ScenarioStatus::Converged) continue;
    (o.status == ScenarioStatus::InvalidTopology ? invalid : failed) += 1;
    log << "scenario " << i << ": " << contingency::to_string(o.status) << ": " << o.message << "\n";
  }
  log << timing.engine << ": " << outcomes.size() - invalid - failed << "/" << outcomes.size() << " converged in "
      << timing.seconds << " s\n";
  man.finished_at = utc_now();
  man.write(args.out);
  if (failed) return static_cast<int>(ExitCode::Convergence);
  if (invalid) return static_cast<int>(ExitCode::Validation);
  return static_cast<int>(ExitCode::Ok);
}

// ----------------------------------------------------------------- predict

namespace {

fs::path split_dir(const fs::path& root, const std::string& split, const char* what) {
  const fs::path d = root / split;
  if (!fs::is_directory(d)) throw IoError(std::string(what) + " for split " + split + " not found at " + d.string());
  return d;
}

}  // namespace

int cmd_predict(const PredictArgs& args, std::ostream& log) {
  RunManifest man;
  man.command = args.kkt ? "predict --kkt" : "predict";
  man.started_at = utc_now();
  auto t0 = Clock::now();
  const auto grid_case = grid::load_case(args.case_path);
  man.case_path = args.case_path.string();
  man.case_hash = sha256_file(args.case_path);
  man.config_path = args.truth.string();

  const auto train = scenario::read_dataset(split_dir(args.truth, "train", "training data"), grid_case);
  surrogate::DcBaseline dc(grid_case);
  surrogate::HardConstrainedSimulator projected(grid_case, dc, args.jobs);
  surrogate::AugmentedSimulator& model = args.kkt ? static_cast<surrogate::AugmentedSimulator&>(projected) : dc;
  model.fit(train);
  man.phases.emplace_back("fit", seconds_since(t0));

  make_dir(args.out);
  std::optional<Timing> first;
  for (const auto& split : args.splits) {
    const auto ds = scenario::read_dataset(split_dir(args.truth, split, "truth data"), grid_case);
    surrogate::InferenceTiming it;
    const auto pred = surrogate::timed_predict(model, ds.samples, args.batch_size, &it);
    Timing t;
    t.engine = model.name();
    t.samples = ds.size();
    t.seconds = it.seconds;
    t.jobs = args.kkt ? resolve_jobs(args.jobs) : 1;
    if (!first) first = t;
    json m;
    m["kind"] = "predictions";
    m["split"] = split;
    m["model"] = model.name();
    m["samples"] = ds.size();
    m["inference_seconds"] = it.seconds;
    m["batch_size"] = args.batch_size;
    m["tool_version"] = GRIDBENCH_VERSION;
    scenario::write_predictions(args.out / split, grid_case, pred, m.dump(2) + "\n");
    man.phases.emplace_back("predict." + split, it.seconds);
    log << split << ": " << ds.size() << " predictions in " << it.seconds << " s\n";
  }
  if (first) write_timing(args.out / "timing.json", *first);
  man.finished_at = utc_now();
  man.write(args.out);
  return static_cast<int>(ExitCode::Ok);
}

// ------------------------------------------------------------------- score

scoring::ScoreWeights load_weights(const fs::path& path) {
  const json j = parse_json_file(path);
  scoring::ScoreWeights w;
  try {
    w.test = j.value("test", w.test);
    w.ood = j.value("ood", w.ood);
    w.speedup = j.value("speedup", w.speedup);
    w.ml = j.value("ml", w.ml);
    w.physics = j.value("physics", w.physics);
    w.weibull_b = j.value("weibull_b", w.weibull_b);
    w.weibull_c = j.value("weibull_c", w.weibull_c);
  } catch (const json::exception& e) {
    throw ParseError(e.what(), 0, path.string());
  }
  w.check();
  return w;
}

namespace {

struct SplitEval {
  metrics::MLReport ml;
  metrics::PhysicsReport physics;
};

SplitEval evaluate_split(const grid::GridCase& c, const fs::path& truth_root, const fs::path& pred_root,
                         const std::string& split) {
  const auto truth = scenario::read_dataset(split_dir(truth_root, split, "truth data"), c);
  const auto pred = scenario::read_predictions(split_dir(pred_root, split, "predictions"), c);
  if (pred.size() != truth.size()) {
    throw ValidationError("predictions for split " + split + " have " + std::to_string(pred.size()) +
                          " samples, truth has " + std::to_string(truth.size()));
  }
  return {metrics::evaluate_ml(pred, truth), metrics::evaluate_physics(c, pred, truth)};
}

}  // namespace

int cmd_score(const ScoreArgs& args, std::ostream& out) {
  RunManifest man;
  man.command = "score";
  man.started_at = utc_now();
  const auto t0 = Clock::now();
  double ratio = 0.0;
  if (args.speedup) {
    ratio = *args.speedup;
  } else {
    if (!args.baseline_timing || !args.inference_timing) {
      throw ValidationError("score needs --speedup or both --baseline-timing and --inference-timing");
    }
    ratio = read_timing(*args.baseline_timing).per_sample() / read_timing(*args.inference_timing).per_sample();
  }
  const auto grid_case = grid::load_case(args.case_path);
  const auto w = args.weights ? load_weights(*args.weights) : scoring::ScoreWeights{};
  const auto test = evaluate_split(grid_case, args.truth, args.pred, "test");
  const auto ood = evaluate_split(grid_case, args.truth, args.pred, "test_ood");
  const auto report = scoring::global_score(test.ml, test.physics, ood.ml, ood.physics, ratio, w);
  out << scoring::render_score_table(report);

  if (args.out) {
    make_dir(*args.out);
    write_text(*args.out / "score.json", scoring::score_report_json(report) + "\n");
    write_text(*args.out / "score.txt", scoring::render_score_table(report));
    json details;
    details["test"] = {{"ml", json::parse(scoring::ml_report_json(test.ml))},
                       {"physics", json::parse(scoring::physics_report_json(test.physics))}};
    details["test_ood"] = {{"ml", json::parse(scoring::ml_report_json(ood.ml))},
                           {"physics", json::parse(scoring::physics_report_json(ood.physics))}};
    write_text(*args.out / "metrics.json", details.dump(2) + "\n");
    man.case_path = args.case_path.string();
    man.case_hash = sha256_file(args.case_path);
    man.config_path = args.pred.string();
    man.phases.emplace_back("score", seconds_since(t0));
    man.finished_at = utc_now();
    man.write(*args.out);
  }
  return static_cast<int>(ExitCode::Ok);
}

// ------------------------------------------------------------------ repeat

RepeatReport run_repeat(const RepeatArgs& args, std::ostream& log) {
  if (args.times < 1) throw ValidationError("--times must be at least 1");
  const auto t_start = Clock::now();
  const auto grid_case = grid::load_case(args.case_path);
  const auto w = args.weights ? load_weights(*args.weights) : scoring::ScoreWeights{};
  const auto train = scenario::read_dataset(split_dir(args.truth, "train", "training data"), grid_case);
  const auto test = scenario::read_dataset(split_dir(args.truth, "test", "truth data"), grid_case);
  const auto ood = scenario::read_dataset(split_dir(args.truth, "test_ood", "truth data"), grid_case);

  surrogate::DcBaseline dc(grid_case);
  surrogate::HardConstrainedSimulator projected(grid_case, dc, args.jobs);
  surrogate::AugmentedSimulator& model = args.kkt ? static_cast<surrogate::AugmentedSimulator&>(projected) : dc;
  model.fit(train);

  SolveInputs in;
  for (const auto& s : test.samples) {
    in.topologies.push_back(s.topology);
    in.injections.push_back(s.injections);
  }
  powerflow::SolverOptions flat;
  (void)solve_sequential(grid_case, in, flat);  // warm-up

  // Non-timing parts are deterministic, so the metrics are computed once.
  const auto pred_test = model.predict(test.samples);
  const auto pred_ood = model.predict(ood.samples);
  const auto ml_test = metrics::evaluate_ml(pred_test, test);
  const auto ph_test = metrics::evaluate_physics(grid_case, pred_test, test);
  const auto ml_ood = metrics::evaluate_ml(pred_ood, ood);
  const auto ph_ood = metrics::evaluate_physics(grid_case, pred_ood, ood);

  RepeatReport rep;
  std::vector<double> globals, ratios;
  for (std::size_t run = 0; run < args.times; ++run) {
    auto t0 = Clock::now();
    (void)solve_sequential(grid_case, in, flat);
    const double baseline = seconds_since(t0);
    surrogate::InferenceTiming it;
    (void)surrogate::timed_predict(model, test.samples, args.batch_size, &it);
    const double ratio = scoring::measure_speedup(baseline, it.seconds);
    rep.runs.push_back(scoring::global_score(ml_test, ph_test, ml_ood, ph_ood, ratio, w));
    globals.push_back(rep.runs.back().global);
    ratios.push_back(ratio);
    log << "run " << run + 1 << ": speed-up " << ratio << ", global " << rep.runs.back().global_percent() << "%\n";
    if (args.budget && seconds_since(t_start) > *args.budget && run + 1 < args.times) {
      log << "warning: budget of " << *args.budget << " s exhausted after " << run + 1 << " runs\n";
      break;
    }
  }
  rep.global = scoring::mean_std(globals);
  rep.speedup_ratio = scoring::mean_std(ratios);
  return rep;
}

int cmd_repeat(const RepeatArgs& args, std::ostream& out) {
  RunManifest man;
  man.command = "repeat";
  man.started_at = utc_now();
  const auto t0 = Clock::now();
  const auto rep = run_repeat(args, out);
  out << scoring::render_score_table(rep.runs.front());
  out << "global over " << rep.runs.size() << " runs: " << scoring::render_mean_std(rep.global) << "\n";
  if (args.out) {
    make_dir(*args.out);
    json j;
    j["runs"] = json::array();
    for (const auto& r : rep.runs) j["runs"].push_back(json::parse(scoring::score_report_json(r)));
    j["global_mean"] = rep.global.mean;
    j["global_std"] = rep.global.std;
    j["speedup_ratio_mean"] = rep.speedup_ratio.mean;
    j["speedup_ratio_std"] = rep.speedup_ratio.std;
    j["summary"] = scoring::render_mean_std(rep.global);
    write_text(*args.out / "repeat.json", j.dump(2) + "\n");
    man.case_path = args.case_path.string();
    man.case_hash = sha256_file(args.case_path);
    man.config_path = args.truth.string();
    man.phases.emplace_back("repeat", seconds_since(t0));
    man.finished_at = utc_now();
    man.write(*args.out);
  }
  return static_cast<int>(ExitCode::Ok);
}

}  // namespace gridbench::cli
