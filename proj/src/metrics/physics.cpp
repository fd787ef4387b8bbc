#include "gridbench/metrics/physics.hpp"

#include <algorithm>
#include <string>

#include "gridbench/error.hpp"

namespace gridbench::metrics {

namespace {

void check_shapes(const grid::GridCase& c, const PredictionSet& pred, const scenario::Dataset& truth) {
  if (pred.size() != truth.size()) {
    throw ValidationError("prediction set has " + std::to_string(pred.size()) + " samples, dataset has " +
                          std::to_string(truth.size()));
  }
  if (truth.size() == 0) throw ValidationError("cannot evaluate an empty dataset");
  const std::size_t L = c.line_count();
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const auto& f = pred.samples[i];
    for (const auto* v : {&f.a_or, &f.a_ex, &f.p_or, &f.p_ex, &f.v_or, &f.v_ex}) {
      if (v->size() != L) throw ValidationError("sample " + std::to_string(i) + ": prediction has the wrong line count");
    }
    for (const auto* v : {&f.q_or, &f.q_ex}) {
      if (!v->empty() && v->size() != L) throw ValidationError("sample " + std::to_string(i) + ": q has the wrong length");
    }
    const auto& s = truth.samples[i];
    if (s.topology.line_status.size() != L || s.injections.prod_p.size() != c.generators().size() ||
        s.injections.load_p.size() != c.loads().size()) {
      throw ValidationError("sample " + std::to_string(i) + ": truth lacks topology or injection context");
    }
  }
}

// Current in per-unit of the case base at a line end.
double current_pu(const grid::GridCase& c, int sub, double amps, double phase_factor) {
  const double kv = c.substations()[static_cast<std::size_t>(sub)].base_kv;
  return amps * phase_factor * kv / (1000.0 * c.base_mva());
}

}  // namespace

SampleBalance sample_balance(const grid::GridCase& c, const scenario::Sample& s, const powerflow::LineFlows& pred) {
  SampleBalance b;
  const grid::NodeMap nodes = grid::compute_node_map(c, s.topology);
  b.node_injection.assign(nodes.size(), 0.0);
  b.node_flow.assign(nodes.size(), 0.0);
  for (std::size_t g = 0; g < c.generators().size(); ++g) {
    b.production += s.injections.prod_p[g];
    const int k = grid::element_node(c, s.topology, nodes, {grid::ElementKind::Generator, static_cast<int>(g)});
    if (k >= 0) b.node_injection[static_cast<std::size_t>(k)] += s.injections.prod_p[g];
  }
  for (std::size_t l = 0; l < c.loads().size(); ++l) {
    b.load += s.injections.load_p[l];
    const int k = grid::element_node(c, s.topology, nodes, {grid::ElementKind::Load, static_cast<int>(l)});
    if (k >= 0) b.node_injection[static_cast<std::size_t>(k)] -= s.injections.load_p[l];
  }
  for (std::size_t l = 0; l < c.line_count(); ++l) {
    if (!s.topology.connected(l)) continue;
    const int li = static_cast<int>(l);
    const int ko = grid::element_node(c, s.topology, nodes, {grid::ElementKind::LineOr, li});
    const int ke = grid::element_node(c, s.topology, nodes, {grid::ElementKind::LineEx, li});
    b.node_flow[static_cast<std::size_t>(ko)] += pred.p_or[l];
    b.node_flow[static_cast<std::size_t>(ke)] += pred.p_ex[l];
  }
  return b;
}

PhysicsReport evaluate_physics(const grid::GridCase& c, const PredictionSet& pred, const scenario::Dataset& truth,
                               const PhysicsTolerances& tol) {
  check_shapes(c, pred, truth);
  const std::size_t n = truth.size();
  const std::size_t L = c.line_count();
  const double node_floor = tol.node_floor_pu * c.base_mva();

  std::size_t neg_a = 0, neg_v = 0, neg_loss = 0, nonnull = 0, disc = 0, out_of_range = 0;
  std::size_t gc_bad = 0, lc_bad = 0, lc_nodes = 0, joule_bad = 0;
  double p6 = 0.0, p7 = 0.0, p8 = 0.0;

  for (std::size_t i = 0; i < n; ++i) {
    const auto& f = pred.samples[i];
    const auto& s = truth.samples[i];
    double losses = 0.0, joule = 0.0;
    for (std::size_t l = 0; l < L; ++l) {
      neg_a += (f.a_or[l] < 0.0) + (f.a_ex[l] < 0.0);
      neg_v += (f.v_or[l] < 0.0) + (f.v_ex[l] < 0.0);
      const double loss = f.p_or[l] + f.p_ex[l];
      if (loss < -tol.negative_eps) ++neg_loss;
      if (!s.topology.connected(l)) {
        ++disc;
        bool any = std::abs(f.a_or[l]) > tol.nonnull_eps || std::abs(f.a_ex[l]) > tol.nonnull_eps ||
                   std::abs(f.p_or[l]) > tol.nonnull_eps || std::abs(f.p_ex[l]) > tol.nonnull_eps;
        if (!f.q_or.empty()) any = any || std::abs(f.q_or[l]) > tol.nonnull_eps || std::abs(f.q_ex[l]) > tol.nonnull_eps;
        nonnull += any;
        continue;
      }
      losses += loss;
      const auto& line = c.lines()[l];
      // The tap sits on the origin side, so the origin current is scaled
      // back to the series branch before averaging.
      const double i_or = current_pu(c, line.sub_or, f.a_or[l], tol.phase_factor) * line.tap;
      const double i_ex = current_pu(c, line.sub_ex, f.a_ex[l], tol.phase_factor);
      const double mean = 0.5 * (i_or + i_ex);
      joule += line.r * (tol.joule == JouleForm::Squared ? mean * mean : mean) * c.base_mva();
    }

    const SampleBalance b = sample_balance(c, s, f);
    const double ratio = b.production > 0.0 ? losses / b.production : 0.0;
    if (ratio < tol.loss_ratio_min || ratio > tol.el_tolerance) ++out_of_range;

    const double expected = b.production - b.load;
    const double gc = std::abs(expected - losses) / std::max(std::abs(expected), node_floor);
    p6 += gc;
    gc_bad += gc > tol.gc_tolerance;

    double node_sum = 0.0;
    for (std::size_t k = 0; k < b.node_injection.size(); ++k) {
      const double r = std::abs(b.node_injection[k] - b.node_flow[k]) / std::max(std::abs(b.node_injection[k]), node_floor);
      node_sum += r;
      lc_bad += r > tol.lc_tolerance;
    }
    lc_nodes += b.node_injection.size();
    p7 += b.node_injection.empty() ? 0.0 : node_sum / static_cast<double>(b.node_injection.size());

    const double jr = std::abs(losses - joule) / std::max(std::abs(losses), node_floor);
    p8 += jr;
    joule_bad += jr > tol.joule_tolerance;
  }

  PhysicsReport r;
  r.tolerances = tol;
  const double entries = static_cast<double>(2 * L * n);
  r.p[0] = static_cast<double>(neg_a) / entries;
  r.p[1] = static_cast<double>(neg_v) / entries;
  r.p[2] = static_cast<double>(neg_loss) / static_cast<double>(L * n);
  r.p[3] = disc ? static_cast<double>(nonnull) / static_cast<double>(disc) : 0.0;
  r.p[4] = static_cast<double>(out_of_range) / static_cast<double>(n);
  r.p[5] = p6 / static_cast<double>(n);
  r.p[6] = p7 / static_cast<double>(n);
  r.p[7] = p8 / static_cast<double>(n);
  r.disconnected_entries = disc;
  r.gc_violation = static_cast<double>(gc_bad) / static_cast<double>(n);
  r.lc_violation = lc_nodes ? static_cast<double>(lc_bad) / static_cast<double>(lc_nodes) : 0.0;
  r.joule_violation = static_cast<double>(joule_bad) / static_cast<double>(n);
  return r;
}

}  // namespace gridbench::metrics
