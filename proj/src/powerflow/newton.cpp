#include "gridbench/powerflow/newton.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/SparseLU>

#include "gridbench/error.hpp"
#include "gridbench/powerflow/dc.hpp"
#include "gridbench/powerflow/line_flows.hpp"

namespace gridbench::powerflow {

using grid::Complex;
using grid::ComplexSparse;

UnknownLayout UnknownLayout::from_types(const std::vector<NodeType>& types) {
  UnknownLayout l;
  l.angle.assign(types.size(), -1);
  l.magnitude.assign(types.size(), -1);
  for (std::size_t k = 0; k < types.size(); ++k) {
    if (types[k] == NodeType::PQ || types[k] == NodeType::PV) l.angle[k] = l.dim++;
  }
  for (std::size_t k = 0; k < types.size(); ++k) {
    if (types[k] == NodeType::PQ) l.magnitude[k] = l.dim++;
  }
  return l;
}

Eigen::VectorXcd complex_voltage(const NodeState& state) {
  Eigen::VectorXcd v(state.vm.size());
  for (Eigen::Index k = 0; k < v.size(); ++k) v[k] = std::polar(state.vm[k], state.va[k]);
  return v;
}

Eigen::VectorXd mismatch(const ComplexSparse& y, const Eigen::VectorXcd& v, const NodeClassification& cls,
                         const UnknownLayout& layout) {
  const Eigen::VectorXcd current = y * v;
  Eigen::VectorXd f(layout.dim);
  for (std::size_t k = 0; k < layout.angle.size(); ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    const Complex s = v[kk] * std::conj(current[kk]);
    if (layout.angle[k] >= 0) f[layout.angle[k]] = s.real() - cls.p_spec[kk];
    if (layout.magnitude[k] >= 0) f[layout.magnitude[k]] = s.imag() - cls.q_spec[kk];
  }
  return f;
}

Eigen::VectorXd mismatch(const grid::GridCase& c, const grid::Topology& topo, const grid::AdmittanceMatrix& y,
                         const NodeState& state, const Injections& inj) {
  const NodeClassification cls = classify_nodes(c, topo, y.nodes, inj);
  return mismatch(y.y, complex_voltage(state), cls, UnknownLayout::from_types(cls.type));
}

JacobianPattern::JacobianPattern(const ComplexSparse& y, const UnknownLayout& layout) : layout_(layout) {
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(4 * y.nonZeros()));
  for (Eigen::Index col = 0; col < y.outerSize(); ++col) {
    for (ComplexSparse::InnerIterator it(y, col); it; ++it) {
      const auto i = static_cast<std::size_t>(it.row());
      const auto k = static_cast<std::size_t>(it.col());
      const int prow = layout.angle[i], qrow = layout.magnitude[i];
      const int acol = layout.angle[k], mcol = layout.magnitude[k];
      if (prow >= 0 && acol >= 0) triplets.emplace_back(prow, acol, 0.0);
      if (prow >= 0 && mcol >= 0) triplets.emplace_back(prow, mcol, 0.0);
      if (qrow >= 0 && acol >= 0) triplets.emplace_back(qrow, acol, 0.0);
      if (qrow >= 0 && mcol >= 0) triplets.emplace_back(qrow, mcol, 0.0);
    }
  }
  jac_.resize(layout.dim, layout.dim);
  jac_.setFromTriplets(triplets.begin(), triplets.end());
  jac_.makeCompressed();

  auto locate = [&](int row, int col) {
    if (row < 0 || col < 0) return -1;
    const auto* outer = jac_.outerIndexPtr();
    const auto* inner = jac_.innerIndexPtr();
    const auto* first = inner + outer[col];
    const auto* last = inner + outer[col + 1];
    const auto* hit = std::lower_bound(first, last, row);
    return static_cast<int>(hit - inner);
  };
  slots_.reserve(static_cast<std::size_t>(y.nonZeros()));
  for (Eigen::Index col = 0; col < y.outerSize(); ++col) {
    for (ComplexSparse::InnerIterator it(y, col); it; ++it) {
      const auto i = static_cast<std::size_t>(it.row());
      const auto k = static_cast<std::size_t>(it.col());
      Slots s;
      s.pa = locate(layout.angle[i], layout.angle[k]);
      s.pm = locate(layout.angle[i], layout.magnitude[k]);
      s.qa = locate(layout.magnitude[i], layout.angle[k]);
      s.qm = locate(layout.magnitude[i], layout.magnitude[k]);
      slots_.push_back(s);
    }
  }
}

void JacobianPattern::fill(const ComplexSparse& y, const Eigen::VectorXcd& v) {
  const Eigen::VectorXcd current = y * v;
  double* values = jac_.valuePtr();
  std::size_t n = 0;
  for (Eigen::Index col = 0; col < y.outerSize(); ++col) {
    for (ComplexSparse::InnerIterator it(y, col); it; ++it, ++n) {
      const Eigen::Index i = it.row();
      const Eigen::Index k = it.col();
      const Complex vn_k = std::abs(v[k]) > 0.0 ? v[k] / std::abs(v[k]) : Complex(1.0, 0.0);
      // dS_i/dtheta_k = j V_i (conj(I_i) [i==k] - conj(Y_ik V_k))
      // dS_i/d|V|_k  = V_i conj(Y_ik Vn_k) + conj(I_i) Vn_i [i==k]
      Complex d_ang = -Complex(0.0, 1.0) * v[i] * std::conj(it.value() * v[k]);
      Complex d_mag = v[i] * std::conj(it.value() * vn_k);
      if (i == k) {
        d_ang += Complex(0.0, 1.0) * v[i] * std::conj(current[i]);
        d_mag += std::conj(current[i]) * vn_k;
      }
      const Slots& s = slots_[n];
      if (s.pa >= 0) values[s.pa] = d_ang.real();
      if (s.pm >= 0) values[s.pm] = d_mag.real();
      if (s.qa >= 0) values[s.qa] = d_ang.imag();
      if (s.qm >= 0) values[s.qm] = d_mag.imag();
    }
  }
}

Eigen::SparseMatrix<double> jacobian(const ComplexSparse& y, const Eigen::VectorXcd& v, const UnknownLayout& layout) {
  JacobianPattern pattern(y, layout);
  pattern.fill(y, v);
  return pattern.matrix();
}

NodeState initial_state(const grid::GridCase& c, const grid::Topology& topo, const grid::NodeMap& nodes,
                        const NodeClassification& cls, const Injections& inj, const SolverOptions& opts) {
  const auto n = static_cast<Eigen::Index>(nodes.size());
  NodeState s;
  s.type = cls.type;
  s.vm = Eigen::VectorXd::Ones(n);
  s.va = Eigen::VectorXd::Zero(n);
  switch (opts.initializer) {
    case Initializer::Flat: break;
    case Initializer::DcWarmStart: s.va = dc_power_flow(c, topo, inj).theta; break;
    case Initializer::External:
      if (opts.external_va.size() != n) throw ValidationError("external initializer has the wrong angle dimension");
      s.va = opts.external_va;
      if (opts.external_vm.size() == n) s.vm = opts.external_vm;
      else if (opts.external_vm.size() != 0) throw ValidationError("external initializer has the wrong magnitude dimension");
      break;
  }
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto t = cls.type[static_cast<std::size_t>(k)];
    if (t == NodeType::PV || t == NodeType::Slack) s.vm[k] = cls.v_set[k];
    if (t == NodeType::Dead) s.vm[k] = s.va[k] = 0.0;
  }
  if (cls.slack >= 0) s.va[cls.slack] = 0.0;
  return s;
}

void realized_production(const grid::GridCase& c, const grid::Topology& topo, const grid::NodeMap& nodes,
                         const ComplexSparse& y, const Eigen::VectorXcd& v, const Injections& inj,
                         std::vector<double>& prod_p, std::vector<double>& prod_q) {
  const double base = c.base_mva();
  const Eigen::VectorXcd current = y * v;
  prod_p = inj.prod_p;
  prod_q.assign(inj.prod_p.size(), 0.0);

  std::vector<double> load_p(nodes.size(), 0.0), load_q(nodes.size(), 0.0), other_p(nodes.size(), 0.0);
  std::vector<int> gen_count(nodes.size(), 0);
  for (std::size_t l = 0; l < c.loads().size(); ++l) {
    const int k = grid::element_node(c, topo, nodes, {grid::ElementKind::Load, static_cast<int>(l)});
    if (k < 0) continue;
    load_p[static_cast<std::size_t>(k)] += inj.load_p[l];
    load_q[static_cast<std::size_t>(k)] += inj.load_q[l];
  }
  std::vector<int> gen_node(c.generators().size(), -1);
  for (std::size_t g = 0; g < c.generators().size(); ++g) {
    const int k = grid::element_node(c, topo, nodes, {grid::ElementKind::Generator, static_cast<int>(g)});
    gen_node[g] = k;
    if (k < 0) continue;
    ++gen_count[static_cast<std::size_t>(k)];
    if (static_cast<int>(g) != c.slack_generator()) other_p[static_cast<std::size_t>(k)] += inj.prod_p[g];
  }
  for (std::size_t g = 0; g < c.generators().size(); ++g) {
    const int k = gen_node[g];
    if (k < 0) continue;
    const auto kk = static_cast<std::size_t>(k);
    const Complex s = v[k] * std::conj(current[k]) * base;
    if (static_cast<int>(g) == c.slack_generator()) prod_p[g] = s.real() + load_p[kk] - other_p[kk];
    prod_q[g] = (s.imag() + load_q[kk]) / gen_count[kk];
  }
}

PowerFlowSolution solve_newton_raphson(const grid::GridCase& c, const grid::Topology& topo, const Injections& inj,
                                       const SolverOptions& opts) {
  opts.check();
  inj.check(c);
  if (const auto verdict = grid::validate_topology(c, topo); !verdict) {
    throw ValidationError("invalid topology: " + verdict.reason);
  }
  const grid::AdmittanceMatrix y = grid::build_ybus(c, topo);
  const NodeClassification cls = classify_nodes(c, topo, y.nodes, inj);
  const UnknownLayout layout = UnknownLayout::from_types(cls.type);

  PowerFlowSolution sol;
  sol.nodes = y.nodes;
  sol.state = initial_state(c, topo, y.nodes, cls, inj, opts);
  JacobianPattern pattern(y.y, layout);
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;

  Eigen::VectorXcd v = complex_voltage(sol.state);
  double norm = 0.0;
  for (int it = 0;; ++it) {
    const Eigen::VectorXd f = mismatch(y.y, v, cls, layout);
    norm = f.size() > 0 ? f.lpNorm<Eigen::Infinity>() : 0.0;
    if (!std::isfinite(norm)) throw ConvergenceError("mismatch diverged to a non-finite value", it + 1, norm);
    if (norm < opts.tolerance) {
      sol.iterations = it + 1;
      break;
    }
    if (it == opts.max_iterations) {
      throw ConvergenceError("Newton-Raphson did not converge after " + std::to_string(it) +
                                 " iterations (mismatch " + std::to_string(norm) + ")",
                             it + 1, norm);
    }
    pattern.fill(y.y, v);
    lu.compute(pattern.matrix());
    if (lu.info() != Eigen::Success) {
      throw ConvergenceError("singular Jacobian at iteration " + std::to_string(it + 1), it + 1, norm);
    }
    const Eigen::VectorXd dx = lu.solve(-f);
    for (std::size_t k = 0; k < layout.angle.size(); ++k) {
      const auto kk = static_cast<Eigen::Index>(k);
      if (layout.angle[k] >= 0) sol.state.va[kk] += dx[layout.angle[k]];
      if (layout.magnitude[k] >= 0) sol.state.vm[kk] += dx[layout.magnitude[k]];
    }
    v = complex_voltage(sol.state);
  }
  sol.mismatch_norm = norm;
  sol.lines = compute_line_flows(c, topo, y.nodes, sol.state);
  realized_production(c, topo, y.nodes, y.y, v, inj, sol.prod_p, sol.prod_q);
  return sol;
}

}  // namespace gridbench::powerflow
