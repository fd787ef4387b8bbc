#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "gridbench/cli/commands.hpp"
#include "gridbench/error.hpp"

using namespace gridbench::cli;

namespace {

// CLI11 stores into std::optional<fs::path> through a string.
void optional_path(CLI::App* app, const std::string& name, std::optional<fs::path>& target, const std::string& help) {
  app->add_option_function<std::string>(name, [&target](const std::string& s) { target = fs::path(s); }, help);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Power-grid surrogate benchmark: dataset generation, power flow, scoring"};
  app.require_subcommand(1);
  app.set_version_flag("--version", GRIDBENCH_VERSION);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "draw and solve the dataset splits of a scenario config");
  g->add_option("--config", gen.config, "scenario config (JSON)")->required();
  g->add_option("--case", gen.case_path, "grid case (MATPOWER .m or native JSON)")->required();
  g->add_option("--out", gen.out, "output root; one directory per split")->required();
  g->add_option("--jobs", gen.jobs, "worker threads (0 = all cores)");
  g->add_option("--seed", gen.seed, "base seed; replaces the config's seeds");
  g->add_option("--samples", gen.samples, "samples per split (overrides the config)");
  g->add_option("--split", gen.splits, "only these splits (repeatable)");
  g->add_flag("--physics", gen.physics, "store admittance and injection attributes");

  SolveArgs solve;
  std::string engine = "batched";
  auto* s = app.add_subcommand("solve", "AC power flow over many topologies");
  s->add_option("--case", solve.case_path, "grid case")->required();
  s->add_flag("--n1-all", solve.n1_all, "every single-line outage of the reference topology");
  optional_path(s, "--scenarios", solve.scenarios, "JSON list of {set_bus, disconnect} scenarios");
  optional_path(s, "--dataset", solve.dataset, "solve the inputs of a dataset split directory");
  s->add_option("--engine", engine, "sequential | batched")->check(CLI::IsMember({"sequential", "batched"}));
  s->add_option("--linear", solve.linear, "batched linear solver: direct | pcg")
      ->check(CLI::IsMember({"direct", "pcg"}));
  s->add_option("--init", solve.init, "flat | dc (default: flat for sequential, dc for batched)")
      ->check(CLI::IsMember({"flat", "dc"}));
  s->add_option("--jobs", solve.jobs, "worker threads for the batched engine (0 = all cores)");
  s->add_option("--out", solve.out, "output directory")->required();
  bool no_warmup = false;
  s->add_flag("--no-warmup", no_warmup, "skip the untimed warm-up pass");

  PredictArgs pred;
  auto* p = app.add_subcommand("predict", "DC baseline surrogate predictions for the test splits");
  p->add_option("--case", pred.case_path, "grid case")->required();
  p->add_option("--truth", pred.truth, "dataset root (train/ plus evaluated splits)")->required();
  p->add_option("--out", pred.out, "prediction root")->required();
  p->add_option("--split", pred.splits, "splits to predict (default test, test_ood)");
  p->add_flag("--kkt", pred.kkt, "mask disconnected lines and project onto nodal conservation");
  p->add_option("--batch-size", pred.batch_size, "inference batch size")->check(CLI::PositiveNumber);
  p->add_option("--jobs", pred.jobs, "worker threads for the projection");

  ScoreArgs score;
  auto* sc = app.add_subcommand("score", "grade predictions and compute the global score");
  sc->add_option("--case", score.case_path, "grid case")->required();
  sc->add_option("--truth", score.truth, "dataset root with test/ and test_ood/")->required();
  sc->add_option("--pred", score.pred, "prediction root with test/ and test_ood/")->required();
  sc->add_option("--speedup", score.speedup, "speed-up ratio (instead of timing files)")->check(CLI::PositiveNumber);
  optional_path(sc, "--baseline-timing", score.baseline_timing, "timing.json of the reference solver");
  optional_path(sc, "--inference-timing", score.inference_timing, "timing.json of the surrogate");
  optional_path(sc, "--weights", score.weights, "JSON weight overrides");
  optional_path(sc, "--out", score.out, "directory for score.json, score.txt, metrics.json");

  RepeatArgs rep;
  auto* r = app.add_subcommand("repeat", "re-time solver and DC baseline N times; mean and std of the score");
  r->add_option("--case", rep.case_path, "grid case")->required();
  r->add_option("--truth", rep.truth, "dataset root with train/, test/, test_ood/")->required();
  r->add_option("--times", rep.times, "number of runs")->check(CLI::PositiveNumber);
  r->add_flag("--kkt", rep.kkt, "use the projected DC baseline");
  r->add_option("--batch-size", rep.batch_size, "inference batch size")->check(CLI::PositiveNumber);
  r->add_option("--jobs", rep.jobs, "worker threads for the projection");
  r->add_option("--budget", rep.budget, "stop starting new runs after this many seconds");
  optional_path(r, "--weights", rep.weights, "JSON weight overrides");
  optional_path(r, "--out", rep.out, "directory for repeat.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ExitCode::Validation);
  }

  try {
    if (*g) return cmd_generate(gen, std::cerr);
    if (*s) {
      solve.engine = engine == "sequential" ? Engine::Sequential : Engine::Batched;
      solve.warmup = !no_warmup;
      return cmd_solve(solve, std::cerr);
    }
    if (*p) return cmd_predict(pred, std::cerr);
    if (*sc) return cmd_score(score, std::cout);
    if (*r) return cmd_repeat(rep, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(exit_code_for(e));
  }
  return static_cast<int>(ExitCode::Failure);
}
