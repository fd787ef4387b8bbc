#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <sstream>

#include "gridbench/cli/commands.hpp"
#include "gridbench/cli/hashing.hpp"
#include "gridbench/error.hpp"
#include "support.hpp"

using namespace gridbench;
using namespace gridbench::cli;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run run_cli(const std::string& args, const testing::TempDir& tmp) {
  const auto out = tmp / "stdout.txt", err = tmp / "stderr.txt";
  const std::string cmd = std::string(GRIDBENCH_CLI) + " " + args + " > " + out.string() + " 2> " + err.string();
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = testing::slurp(out);
  r.err = testing::slurp(err);
  return r;
}

std::string case118() { return testing::data_file("case118.m").string(); }
std::string desk() { return testing::config_file("desk.json").string(); }

std::size_t count_lines(const testing::fs::path& p) {
  std::istringstream in(testing::slurp(p));
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) n += !line.empty();
  return n;
}

// Hash of every file under `dir` except run manifests (which hold timestamps).
std::string tree_hash(const testing::fs::path& dir) {
  std::vector<testing::fs::path> files;
  for (const auto& e : testing::fs::recursive_directory_iterator(dir))
    if (e.is_regular_file() && e.path().filename() != "run_manifest.json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::string all;
  for (const auto& f : files) all += testing::fs::relative(f, dir).string() + ":" + sha256_file(f) + "\n";
  return sha256_hex(all);
}

}  // namespace

TEST_CASE("sha256 known vectors") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK_THROWS_AS(sha256_file("/nonexistent/file"), IoError);
}

TEST_CASE("exception classes map to exit codes") {
  CHECK(exit_code_for(IoError("x")) == ExitCode::Io);
  CHECK(exit_code_for(ValidationError("x")) == ExitCode::Validation);
  CHECK(exit_code_for(ParseError("x", 1, "f")) == ExitCode::Validation);
  CHECK(exit_code_for(ConvergenceError("x", 3, 1.0)) == ExitCode::Convergence);
  CHECK(exit_code_for(std::runtime_error("x")) == ExitCode::Failure);
}

TEST_CASE("seed override keeps the default layout at base 1") {
  auto cfg = testing::desk_config();
  const auto original = cfg;
  override_seeds(cfg, 1);
  for (std::size_t i = 0; i < cfg.splits.size(); ++i) {
    CHECK(cfg.splits[i].env_seed == original.splits[i].env_seed);
    CHECK(cfg.splits[i].actor_seed == original.splits[i].actor_seed);
  }
  override_seeds(cfg, 11);
  CHECK(cfg.split("train").env_seed == 11);
  CHECK(cfg.split("test_ood").env_seed == 14);
  CHECK(cfg.split("train").actor_seed == 15);
  CHECK(cfg.split("test_ood").actor_seed == 18);
}

TEST_CASE("timing files round-trip") {
  testing::TempDir tmp;
  Timing t{"batched", 186, 0.25, 0.3, 2};
  write_timing(tmp / "t.json", t);
  const auto back = read_timing(tmp / "t.json");
  CHECK(back.engine == "batched");
  CHECK(back.samples == 186);
  CHECK(back.seconds == 0.25);
  CHECK(back.per_sample() == doctest::Approx(0.25 / 186));
  CHECK_THROWS_AS(read_timing(tmp / "missing.json"), IoError);
}

TEST_CASE("cli usage errors exit with 2") {
  testing::TempDir tmp;
  CHECK(run_cli("", tmp).code == 2);
  CHECK(run_cli("solve --bogus", tmp).code == 2);
  CHECK(run_cli("frobnicate", tmp).code == 2);
}

TEST_CASE("cli n-1 sweep writes one status row per line") {
  testing::TempDir tmp;
  const auto r = run_cli("solve --case " + case118() + " --n1-all --jobs 1 --out " + (tmp / "n1").string(), tmp);
  // Radial lines island a bus, so some scenarios are invalid topologies.
  CHECK(r.code == 2);
  CHECK(count_lines(tmp / "n1" / "status.csv") == 187);
  CHECK(testing::fs::exists(tmp / "n1" / "lines.csv"));
  CHECK(testing::fs::exists(tmp / "n1" / "run_manifest.json"));
  CHECK(testing::slurp(tmp / "n1" / "status.csv").find("invalid_topology") != std::string::npos);
}

TEST_CASE("cli empty scenario file writes nothing") {
  testing::TempDir tmp;
  std::ofstream(tmp / "empty.json") << "[]";
  const auto r = run_cli("solve --case " + case118() + " --scenarios " + (tmp / "empty.json").string() + " --out " +
                             (tmp / "out").string(),
                         tmp);
  CHECK(r.code == 0);
  CHECK(r.err.find("warning") != std::string::npos);
  CHECK_FALSE(testing::fs::exists(tmp / "out"));
}

TEST_CASE("cli scenario file with a bad substation is a validation error") {
  testing::TempDir tmp;
  std::ofstream(tmp / "bad.json") << R"([{"set_bus": [[9999, [1, 2]]]}])";
  const auto r = run_cli("solve --case " + case118() + " --scenarios " + (tmp / "bad.json").string() + " --out " +
                             (tmp / "out").string(),
                         tmp);
  CHECK(r.code == 2);
  CHECK(run_cli("solve --case /nonexistent.m --n1-all --out " + (tmp / "o").string(), tmp).code == 4);
}

TEST_CASE("cli invalid config names the key") {
  testing::TempDir tmp;
  auto text = testing::slurp(desk());
  text.replace(text.find("[0.5, 0.5]"), 10, "[0.5, 0.4]");
  std::ofstream(tmp / "cfg.json") << text;
  const auto r = run_cli("generate --config " + (tmp / "cfg.json").string() + " --case " + case118() + " --out " +
                             (tmp / "ds").string(),
                         tmp);
  CHECK(r.code == 2);
  CHECK(r.err.find("prob_depth") != std::string::npos);
}

TEST_CASE("cli generation is reproducible across worker counts") {
  testing::TempDir tmp;
  const std::string base = "generate --config " + desk() + " --case " + case118() + " --samples 15 --split test_ood";
  REQUIRE(run_cli(base + " --jobs 1 --out " + (tmp / "a").string(), tmp).code == 0);
  REQUIRE(run_cli(base + " --jobs 3 --out " + (tmp / "b").string(), tmp).code == 0);
  CHECK(tree_hash(tmp / "a") == tree_hash(tmp / "b"));
  REQUIRE(run_cli(base + " --jobs 1 --seed 40 --out " + (tmp / "c").string(), tmp).code == 0);
  CHECK(tree_hash(tmp / "a") != tree_hash(tmp / "c"));
}

TEST_CASE("cli predict and score pipeline") {
  testing::TempDir tmp;
  const auto truth = (tmp / "truth").string();
  for (const std::string split : {"train", "test"}) {
    REQUIRE(run_cli("generate --config " + desk() + " --case " + case118() + " --samples 20 --jobs 1 --split " + split +
                        " --out " + truth,
                    tmp)
                .code == 0);
  }
  REQUIRE(run_cli("predict --case " + case118() + " --truth " + truth + " --split test --kkt --out " +
                      (tmp / "pred").string(),
                  tmp)
              .code == 0);
  CHECK(testing::fs::exists(tmp / "pred" / "test" / "p_or.csv"));
  CHECK(testing::fs::exists(tmp / "pred" / "timing.json"));

  // Scoring needs both evaluation splits; the missing one is named.
  const auto missing = run_cli("score --case " + case118() + " --truth " + truth + " --pred " + (tmp / "pred").string() +
                                   " --speedup 5",
                               tmp);
  CHECK(missing.code == 4);
  CHECK(missing.err.find("test_ood") != std::string::npos);

  // Truth scored against itself with a speed-up of 5.
  REQUIRE(run_cli("generate --config " + desk() + " --case " + case118() +
                      " --samples 20 --jobs 1 --split test_ood --out " + truth,
                  tmp)
              .code == 0);
  const auto s = run_cli("score --case " + case118() + " --truth " + truth + " --pred " + truth +
                             " --speedup 5 --out " + (tmp / "score").string(),
                         tmp);
  CHECK(s.code == 0);
  CHECK(s.out.find("global") != std::string::npos);
  CHECK(testing::fs::exists(tmp / "score" / "score.json"));
  CHECK(testing::fs::exists(tmp / "score" / "run_manifest.json"));
  // All great on both splits plus 0.4 * 0.1 from the speed-up.
  CHECK(s.out.find("64.0%") != std::string::npos);
}
