// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit when any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "gridbench/contingency/batch.hpp"
#include "gridbench/error.hpp"
#include "gridbench/grid/ybus.hpp"
#include "gridbench/metrics/ml.hpp"
#include "gridbench/metrics/physics.hpp"
#include "gridbench/powerflow/newton.hpp"
#include "gridbench/scenario/dataset.hpp"
#include "gridbench/scenario/dataset_io.hpp"
#include "gridbench/scenario/injection_profile.hpp"
#include "gridbench/scenario/sampler.hpp"
#include "gridbench/scoring/scoring.hpp"
#include "gridbench/surrogate/kkt.hpp"
#include "support.hpp"

using namespace gridbench;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// ------------------------------------------------------------------------ 1
Verdict score_reproduction() {
  auto cfg = testing::desk_config();
  scenario::GenerateOptions opts;
  opts.samples = 300;
  const auto test = scenario::generate_dataset(testing::case118(), cfg, "test", opts);
  const auto ood = scenario::generate_dataset(testing::case118(), cfg, "test_ood", opts);

  const auto t0 = Clock::now();
  const auto pt = scenario::as_predictions(test);
  const auto po = scenario::as_predictions(ood);
  const auto f1 = scoring::global_score(metrics::evaluate_ml(pt, test), metrics::evaluate_physics(testing::case118(), pt, test),
                                        metrics::evaluate_ml(po, ood), metrics::evaluate_physics(testing::case118(), po, ood),
                                        3.77);
  using G = scoring::Grade;
  const std::vector<G> ml_test = {G::Great, G::Great, G::Acceptable, G::Acceptable, G::Unacceptable, G::Unacceptable};
  const std::vector<G> ml_ood = {G::Acceptable, G::Acceptable, G::Acceptable, G::Acceptable, G::Unacceptable, G::Unacceptable};
  const std::vector<G> phys = {G::Great,        G::Great,        G::Acceptable,   G::Unacceptable,
                               G::Unacceptable, G::Unacceptable, G::Unacceptable, G::Unacceptable};
  const scoring::ScoreWeights w;
  const auto f2 = scoring::global_score(scoring::score_split(ml_test, phys, w), scoring::score_split(ml_ood, phys, w), 11.9);
  const double elapsed = seconds_since(t0);

  const bool f1_ok = std::abs(f1.global_percent() - 62.5) <= 0.1 && std::abs(f1.test.score - 1.0) < 1e-12 &&
                     std::abs(f1.ood.score - 1.0) < 1e-12 && std::abs(f1.speedup - 0.06) <= 0.005;
  const bool f2_ok = std::abs(f2.global_percent() - 37.6) <= 0.1 && std::abs(f2.test.score - 0.44) <= 0.01 &&
                     std::abs(f2.ood.score - 0.33) <= 0.01 && std::abs(f2.speedup - 0.36) <= 0.01;
  std::ostringstream d;
  d << "truth-as-prediction " << fmt("%.2f%%", f1.global_percent()) << " (" << fmt("%.2f", f1.test.score) << ", "
    << fmt("%.2f", f1.ood.score) << ", " << fmt("%.4f", f1.speedup) << "); grade vectors "
    << fmt("%.2f%%", f2.global_percent()) << " (" << fmt("%.5f", f2.test.score) << ", " << fmt("%.5f", f2.ood.score)
    << ", " << fmt("%.4f", f2.speedup) << "); scoring " << fmt("%.3f s", elapsed);
  return {f1_ok && f2_ok && elapsed < 1.0, d.str()};
}

// ------------------------------------------------------------------------ 2
Verdict weibull_constant() {
  const double a = scoring::ScoreWeights{}.weibull_a();
  const double expected = 5.0 * std::pow(-std::log(0.9), -1.0 / 1.7);
  const double truncated = std::floor(a * 100.0) / 100.0;
  std::ostringstream d;
  d << "a = " << fmt("%.6f", a) << ", truncated to 2 d.p. " << fmt("%.2f", truncated) << " (rounded "
    << fmt("%.2f", a) << "); score(5) = " << fmt("%.6f", scoring::speedup_score(5.0));
  return {std::abs(a - expected) < 1e-12 && truncated == 18.78 && std::abs(scoring::speedup_score(5.0) - 0.1) < 1e-12, d.str()};
}

// ------------------------------------------------------------------------ 3
Verdict solver_correctness() {
  const auto t0 = Clock::now();
  std::ostringstream d;
  bool ok = true;
  for (const auto* c : {&testing::case14(), &testing::case118()}) {
    const auto sol = powerflow::solve_newton_raphson(*c, grid::Topology::reference(*c), powerflow::Injections::nominal(*c));
    ok = ok && sol.mismatch_norm < 1e-8 && sol.iterations <= 30;
    d << c->substation_count() << "-bus: " << sol.iterations << " it, mismatch " << fmt("%.1e", sol.mismatch_norm) << "; ";
  }

  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto c = testing::random_case(rng, 6, 3);
    const auto topo = grid::Topology::reference(c);
    const auto inj = powerflow::Injections::nominal(c);
    const auto y = grid::build_ybus(c, topo);
    const auto cls = powerflow::classify_nodes(c, topo, y.nodes, inj);
    const auto layout = powerflow::UnknownLayout::from_types(cls.type);
    powerflow::NodeState s;
    s.type = cls.type;
    s.vm.resize(y.size());
    s.va.resize(y.size());
    for (Eigen::Index k = 0; k < y.size(); ++k) {
      s.vm[k] = 0.9 + 0.2 * u(rng);
      s.va[k] = -0.3 + 0.6 * u(rng);
    }
    const Eigen::MatrixXd jac = Eigen::MatrixXd(powerflow::jacobian(y.y, powerflow::complex_voltage(s), layout));
    Eigen::MatrixXd fd(layout.dim, layout.dim);
    const double h = 1e-6;
    for (std::size_t k = 0; k < layout.angle.size(); ++k) {
      for (int which = 0; which < 2; ++which) {
        const int col = which == 0 ? layout.angle[k] : layout.magnitude[k];
        if (col < 0) continue;
        auto& x = which == 0 ? s.va : s.vm;
        const double keep = x[static_cast<Eigen::Index>(k)];
        x[static_cast<Eigen::Index>(k)] = keep + h;
        const Eigen::VectorXd fp = powerflow::mismatch(y.y, powerflow::complex_voltage(s), cls, layout);
        x[static_cast<Eigen::Index>(k)] = keep - h;
        const Eigen::VectorXd fm = powerflow::mismatch(y.y, powerflow::complex_voltage(s), cls, layout);
        x[static_cast<Eigen::Index>(k)] = keep;
        fd.col(col) = (fp - fm) / (2.0 * h);
      }
    }
    worst = std::max(worst, (jac - fd).cwiseAbs().maxCoeff() / jac.cwiseAbs().maxCoeff());
  }
  ok = ok && worst < 1e-6;
  const double elapsed = seconds_since(t0);
  d << "Jacobian vs finite differences on 20 random 6-bus cases: worst relative error " << fmt("%.1e", worst) << "; "
    << fmt("%.2f s", elapsed);
  return {ok && elapsed < 10.0, d.str()};
}

// ------------------------------------------------------------------------ 4
Verdict truth_physics() {
  const auto t0 = Clock::now();
  const auto cfg = testing::desk_config();
  scenario::GenerateOptions opts;
  opts.samples = 1000;
  const auto test = scenario::generate_dataset(testing::case118(), cfg, "test", opts);
  const auto rep = metrics::evaluate_physics(testing::case118(), scenario::as_predictions(test), test);
  const auto thr = scoring::ThresholdTable::standard();
  bool ok = rep.p[0] == 0.0 && rep.p[1] == 0.0 && rep.p[2] == 0.0 && rep.p[3] == 0.0 && rep.p[4] == 0.0;
  for (int i = 5; i < 8; ++i) ok = ok && scoring::discretize(rep.p[static_cast<std::size_t>(i)], thr.physics[static_cast<std::size_t>(i)]) == scoring::Grade::Great;
  const double elapsed = seconds_since(t0);
  std::ostringstream d;
  d << "1000 samples: P1-P5 = " << rep.p[0] << " " << rep.p[1] << " " << rep.p[2] << " " << rep.p[3] << " " << rep.p[4]
    << ", P6 " << fmt("%.2e", rep.p[5]) << ", P7 " << fmt("%.2e", rep.p[6]) << ", P8 " << fmt("%.2e", rep.p[7])
    << " (" << test.loss_redraws << " loss-ratio redraws); " << fmt("%.1f s", elapsed);
  return {ok && elapsed < 60.0, d.str()};
}

// ------------------------------------------------------------------------ 5
std::vector<contingency::ScenarioOutcome> sequential_n1(const grid::GridCase& c, const std::vector<grid::Topology>& topos,
                                                        const powerflow::Injections& inj) {
  std::vector<contingency::ScenarioOutcome> out(topos.size());
  for (std::size_t i = 0; i < topos.size(); ++i) {
    if (!grid::validate_topology(c, topos[i])) {
      out[i].status = contingency::ScenarioStatus::InvalidTopology;
      continue;
    }
    try {
      out[i].solution = powerflow::solve_newton_raphson(c, topos[i], inj);
      out[i].status = contingency::ScenarioStatus::Converged;
    } catch (const gridbench::ConvergenceError&) {
      out[i].status = contingency::ScenarioStatus::NotConverged;
    }
  }
  return out;
}

double median_of_3(const std::function<void()>& fn) {
  std::vector<double> t;
  for (int i = 0; i < 3; ++i) {
    const auto t0 = Clock::now();
    fn();
    t.push_back(seconds_since(t0));
  }
  std::sort(t.begin(), t.end());
  return t[1];
}

Verdict batched_equivalence() {
  const auto t_all = Clock::now();
  const auto& c = testing::case118();
  const auto topos = contingency::n1_topologies(c, grid::Topology::reference(c));
  const auto inj = powerflow::Injections::nominal(c);
  const std::vector<powerflow::Injections> injs(topos.size(), inj);
  powerflow::SolverOptions dc;
  dc.initializer = powerflow::Initializer::DcWarmStart;
  contingency::BatchOptions direct;
  direct.jobs = 1;

  const auto seq = sequential_n1(c, topos, inj);
  const auto bat = contingency::batch_solve(c, topos, injs, dc, direct);
  double dv = 0.0, dth = 0.0;
  std::size_t both = 0, seq_ok = 0, bat_ok = 0;
  for (std::size_t i = 0; i < topos.size(); ++i) {
    const bool a = seq[i].status == contingency::ScenarioStatus::Converged;
    const bool b = bat.outcomes[i].status == contingency::ScenarioStatus::Converged;
    seq_ok += a;
    bat_ok += b;
    if (!a || !b) continue;
    ++both;
    const auto& x = seq[i].solution->state;
    const auto& z = bat.outcomes[i].solution->state;
    dv = std::max(dv, (x.vm - z.vm).cwiseAbs().maxCoeff());
    dth = std::max(dth, (x.va - z.va).cwiseAbs().maxCoeff());
  }

  const double t_seq = median_of_3([&] { (void)sequential_n1(c, topos, inj); });
  const double t_bat = median_of_3([&] { (void)contingency::batch_solve(c, topos, injs, dc, direct); });
  contingency::BatchOptions pcg = direct;
  pcg.linear_solver = contingency::LinearSolver::Pcg;
  const auto t0 = Clock::now();
  (void)contingency::batch_solve(c, topos, injs, dc, pcg);
  const double t_pcg = seconds_since(t0);

  const double ratio = t_seq / t_bat;
  const double elapsed = seconds_since(t_all);
  std::ostringstream d;
  d << topos.size() << " scenarios, converged sequential " << seq_ok << " / batched " << bat_ok << ", compared "
    << both << ": max |dv| " << fmt("%.1e", dv) << " pu, max |dtheta| " << fmt("%.1e", dth) << " rad; sequential "
    << fmt("%.3f s", t_seq) << ", batched " << fmt("%.3f s", t_bat) << ", speed-up " << fmt("%.2fx", ratio)
    << " (pcg variant " << fmt("%.2fx", t_seq / t_pcg) << "); " << fmt("%.1f s", elapsed);
  const bool ok = topos.size() == 186 && both > 0 && seq_ok == bat_ok && dv < 1e-6 && dth < 1e-6 && ratio >= 2.0;
  return {ok && elapsed < 120.0, d.str()};
}

// ------------------------------------------------------------------------ 6
Verdict kkt_projection() {
  const auto t0 = Clock::now();
  const auto& c = testing::case14();
  scenario::Rng env(11);
  std::mt19937_64 rng(77);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const surrogate::KktProjector projector(c);

  scenario::Dataset truth;
  metrics::PredictionSet projected;
  double worst_residual = 0.0, worst_idem = 0.0;
  const auto reference = grid::Topology::reference(c);
  scenario::InjectionParams params;
  for (std::size_t draw = 0; truth.size() < 100; ++draw) {
    const std::size_t i = truth.size();
    grid::Topology topo = reference;
    if (draw % 2 == 1) topo.line_status[(draw / 2) % c.line_count()] = 0;
    if (!grid::validate_topology(c, topo)) continue;  // islanding outage
    scenario::Sample s;
    s.injections = scenario::sample_injections(c, params, env);
    const auto sol = powerflow::solve_newton_raphson(c, topo, s.injections, scenario::reference_solver_options());
    s.injections.prod_p = sol.prod_p;
    s.topology = topo;
    s.flows = sol.lines;

    powerflow::LineFlows pred = s.flows;
    for (std::size_t l = 0; l < c.line_count(); ++l) {
      // alternate small perturbations and unrelated random vectors
      pred.p_or[l] = i % 3 == 0 ? 200.0 * u(rng) : pred.p_or[l] + 10.0 * noise(rng);
      pred.p_ex[l] = i % 3 == 0 ? 200.0 * u(rng) : pred.p_ex[l] + 10.0 * noise(rng);
    }
    const auto sys = surrogate::build_conservation_constraints(c, topo, s.injections);
    const Eigen::VectorXd y = surrogate::flatten_active_power(pred);
    const Eigen::VectorXd once = projector.project(y, topo, s.injections);
    const Eigen::VectorXd twice = projector.project(once, topo, s.injections);
    worst_residual = std::max(worst_residual, (sys.a * once - sys.b).cwiseAbs().maxCoeff());
    worst_idem = std::max(worst_idem, (twice - once).cwiseAbs().maxCoeff());
    surrogate::unflatten_active_power(once, pred);
    projected.samples.push_back(pred);
    truth.samples.push_back(std::move(s));
  }
  const auto rep = metrics::evaluate_physics(c, projected, truth);
  const double elapsed = seconds_since(t0);
  std::ostringstream d;
  d << "100 IEEE-14 predictions: residual " << fmt("%.1e", worst_residual) << " MW, idempotence "
    << fmt("%.1e", worst_idem) << ", P7 " << fmt("%.1e", rep.p[6]) << ", " << projector.cached_topologies()
    << " cached factorizations; " << fmt("%.2f s", elapsed);
  return {worst_residual < 1e-10 && worst_idem <= 1e-12 && rep.p[6] <= 1e-6 && elapsed < 5.0, d.str()};
}

// ------------------------------------------------------------------------ 7
bool same_tree(const testing::fs::path& a, const testing::fs::path& b, std::size_t& files) {
  std::size_t mine = 0, other = 0;
  for (const auto& e : testing::fs::recursive_directory_iterator(a)) {
    if (!e.is_regular_file()) continue;
    const auto rel = testing::fs::relative(e.path(), a);
    if (testing::slurp(e.path()) != testing::slurp(b / rel)) return false;
    ++mine;
  }
  for (const auto& e : testing::fs::recursive_directory_iterator(b)) other += e.is_regular_file();
  files += mine;
  return other == mine;
}

Verdict generator_calibration() {
  const auto t0 = Clock::now();
  const auto& c = testing::case118();
  const auto cfg = testing::desk_config();

  const auto train = scenario::generate_dataset(c, cfg, "train");
  std::size_t zero = 0;
  for (const auto& s : train.samples) zero += s.topology.disconnected_count() == 0;
  const double frac = static_cast<double>(zero) / static_cast<double>(train.size());

  scenario::GenerateOptions opts;
  opts.samples = 1000;
  const auto test = scenario::generate_dataset(c, cfg, "test", opts);
  bool test_ok = true;
  for (const auto& s : test.samples) test_ok = test_ok && s.topology.disconnected_count() == 1;

  const auto ood = scenario::generate_dataset(c, cfg, "test_ood", opts);
  const scenario::LineDistance dist(c);
  const int region = *cfg.split("test_ood").region_distance;
  bool ood_ok = true;
  for (const auto& s : ood.samples) {
    ood_ok = ood_ok && s.disconnected_lines.size() == 2 && s.topology.disconnected_count() == 2 &&
             dist.lines(s.disconnected_lines[0], s.disconnected_lines[1]) <= region;
  }

  testing::TempDir tmp;
  scenario::GenerateOptions small;
  small.samples = 200;
  std::size_t files = 0;
  bool identical = true;
  for (const char* split : {"train", "test_ood"}) {
    small.jobs = 1;
    scenario::write_dataset(tmp / (std::string("a_") + split), c, scenario::generate_dataset(c, cfg, split, small));
    small.jobs = 3;
    scenario::write_dataset(tmp / (std::string("b_") + split), c, scenario::generate_dataset(c, cfg, split, small));
    identical = identical && same_tree(tmp / (std::string("a_") + split), tmp / (std::string("b_") + split), files);
  }
  const double elapsed = seconds_since(t0);
  std::ostringstream d;
  d << "train " << train.size() << " samples, zero-disconnection fraction " << fmt("%.4f", frac)
    << "; test 1000 single outages " << (test_ok ? "ok" : "VIOLATED") << "; test_ood 1000 double outages within "
    << region << " hop " << (ood_ok ? "ok" : "VIOLATED") << "; regeneration " << (identical ? "byte-identical" : "DIFFERS")
    << " over " << files << " files; " << fmt("%.1f s", elapsed);
  return {std::abs(frac - 0.30) <= 0.02 && test_ok && ood_ok && identical && elapsed < 600.0, d.str()};
}

// ------------------------------------------------------------------------ 8
Verdict metric_oracles() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 5 + static_cast<std::size_t>(u(rng) * 400);
    std::vector<double> truth(n), pred(n);
    for (std::size_t i = 0; i < n; ++i) {
      truth[i] = u(rng) < 0.05 ? 0.0 : (u(rng) < 0.5 ? -1.0 : 1.0) * std::exp(6.0 * u(rng));
      pred[i] = truth[i] * (1.0 + 0.2 * (u(rng) - 0.5)) + (u(rng) - 0.5);
    }
    worst = std::max(worst, std::abs(metrics::mape_top_quantile(pred, truth, 0.1) - testing::oracle_mape_top(pred, truth, 0.1)));
    worst = std::max(worst, std::abs(metrics::mape_top_quantile(pred, truth, 0.9) - testing::oracle_mape_top(pred, truth, 0.9)));
    worst = std::max(worst, std::abs(metrics::mae(pred, truth) - testing::oracle_mae(pred, truth)));
  }
  const double elapsed = seconds_since(t0);
  std::ostringstream d;
  d << "50 random pairs: worst |implementation - oracle| " << fmt("%.1e", worst) << "; " << fmt("%.3f s", elapsed);
  return {worst <= 1e-12 && elapsed < 1.0, d.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"1 score reproduction", score_reproduction},
      {"2 Weibull constant", weibull_constant},
      {"3 solver correctness", solver_correctness},
      {"4 physics compliance of truth", truth_physics},
      {"5 batched-sequential equivalence", batched_equivalence},
      {"6 KKT projection", kkt_projection},
      {"7 scenario generator calibration", generator_calibration},
      {"8 metric oracle equivalence", metric_oracles},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Verdict v;
    try {
      v = fn();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failed += !v.pass;
    std::cout << (v.pass ? "PASS " : "FAIL ") << name << ": " << v.detail << std::endl;
  }
  std::cout << (failed ? std::to_string(failed) + " criteria failed" : "all criteria passed") << std::endl;
  return failed ? 1 : 0;
}
