#include "gridbench/surrogate/kkt.hpp"

#include <cmath>

#include <Eigen/Cholesky>

#include "gridbench/error.hpp"

namespace gridbench::surrogate {

using grid::ElementKind;

LinearConstraintSystem build_conservation_constraints(const grid::GridCase& c, const grid::Topology& topo,
                                                      const powerflow::Injections& inj) {
  if (const auto v = grid::validate_topology(c, topo); !v) throw ValidationError("invalid topology: " + v.reason);
  inj.check(c);
  const std::size_t L = c.line_count();
  const grid::NodeMap nodes = grid::compute_node_map(c, topo);

  std::vector<double> injection(nodes.size(), 0.0);
  for (std::size_t g = 0; g < c.generators().size(); ++g) {
    const int k = grid::element_node(c, topo, nodes, {ElementKind::Generator, static_cast<int>(g)});
    if (k >= 0) injection[static_cast<std::size_t>(k)] += inj.prod_p[g];
  }
  for (std::size_t d = 0; d < c.loads().size(); ++d) {
    const int k = grid::element_node(c, topo, nodes, {ElementKind::Load, static_cast<int>(d)});
    if (k >= 0) injection[static_cast<std::size_t>(k)] -= inj.load_p[d];
  }

  std::vector<std::vector<int>> cols(nodes.size());
  for (std::size_t l = 0; l < L; ++l) {
    if (!topo.connected(l)) continue;
    const int li = static_cast<int>(l);
    cols[static_cast<std::size_t>(grid::element_node(c, topo, nodes, {ElementKind::LineOr, li}))].push_back(li);
    cols[static_cast<std::size_t>(grid::element_node(c, topo, nodes, {ElementKind::LineEx, li}))].push_back(
        static_cast<int>(L) + li);
  }

  LinearConstraintSystem sys;
  std::vector<Eigen::Triplet<double>> trip;
  std::vector<double> rhs;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    if (cols[k].empty()) {
      // lone injection with nowhere to go
      if (std::abs(injection[k]) > 1e-9) {
        throw ValidationError("node without connected lines carries a nonzero injection");
      }
      continue;
    }
    const int row = static_cast<int>(sys.row_node.size());
    for (int j : cols[k]) trip.emplace_back(row, j, 1.0);
    rhs.push_back(injection[k]);
    sys.row_node.push_back(static_cast<int>(k));
  }
  sys.a.resize(static_cast<Eigen::Index>(sys.row_node.size()), static_cast<Eigen::Index>(2 * L));
  sys.a.setFromTriplets(trip.begin(), trip.end());
  sys.b = Eigen::Map<const Eigen::VectorXd>(rhs.data(), static_cast<Eigen::Index>(rhs.size()));
  return sys;
}

Eigen::VectorXd flatten_active_power(const powerflow::LineFlows& f) {
  const auto L = static_cast<Eigen::Index>(f.p_or.size());
  if (f.p_ex.size() != f.p_or.size()) throw ValidationError("p_or and p_ex differ in length");
  Eigen::VectorXd y(2 * L);
  for (Eigen::Index l = 0; l < L; ++l) {
    y[l] = f.p_or[static_cast<std::size_t>(l)];
    y[L + l] = f.p_ex[static_cast<std::size_t>(l)];
  }
  return y;
}

void unflatten_active_power(const Eigen::VectorXd& y, powerflow::LineFlows& f) {
  const auto L = static_cast<Eigen::Index>(f.p_or.size());
  if (y.size() != 2 * L || f.p_ex.size() != f.p_or.size()) throw ValidationError("flattened vector has the wrong size");
  for (Eigen::Index l = 0; l < L; ++l) {
    f.p_or[static_cast<std::size_t>(l)] = y[l];
    f.p_ex[static_cast<std::size_t>(l)] = y[L + l];
  }
}

namespace {

Eigen::LLT<Eigen::MatrixXd> factor_gram(const LinearConstraintSystem& sys) {
  const Eigen::MatrixXd gram = Eigen::MatrixXd(sys.a * sys.a.transpose());
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success) throw ValidationError("constraint matrix is rank deficient");
  // pivots of the Gram matrix are the squared Cholesky diagonal
  const Eigen::VectorXd pivots = llt.matrixLLT().diagonal().cwiseAbs2();
  if (pivots.size() > 0 && pivots.minCoeff() <= 1e-12 * std::max(1.0, pivots.maxCoeff())) {
    throw ValidationError("constraint matrix is rank deficient");
  }
  return llt;
}

Eigen::VectorXd apply(const Eigen::VectorXd& y, const LinearConstraintSystem& sys,
                      const Eigen::LLT<Eigen::MatrixXd>& llt) {
  if (y.size() != sys.dimension()) throw ValidationError("prediction vector does not match the constraint system");
  const Eigen::VectorXd r = sys.a * y - sys.b;
  const Eigen::VectorXd lambda = llt.solve(r);
  return y - sys.a.transpose() * lambda;
}

std::string signature(const grid::Topology& t) {
  std::string s;
  s.reserve(t.busbar.size() + t.line_status.size());
  for (int b : t.busbar) s.push_back(static_cast<char>('0' + b));
  s.push_back('|');
  for (auto st : t.line_status) s.push_back(st ? '1' : '0');
  return s;
}

}  // namespace

Eigen::VectorXd kkt_project(const Eigen::VectorXd& y, const LinearConstraintSystem& sys) {
  if (y.size() != sys.dimension()) throw ValidationError("prediction vector does not match the constraint system");
  return apply(y, sys, factor_gram(sys));
}

struct KktProjector::Factor {
  Eigen::LLT<Eigen::MatrixXd> llt;
};

std::shared_ptr<const KktProjector::Factor> KktProjector::factor_for(const grid::Topology& topo,
                                                                     const LinearConstraintSystem& sys) const {
  const std::string key = signature(topo);
  {
    std::lock_guard lock(mutex_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  auto f = std::make_shared<Factor>(Factor{factor_gram(sys)});
  std::lock_guard lock(mutex_);
  // another thread may have won the race; both factors are identical
  return cache_.emplace(key, std::move(f)).first->second;
}

Eigen::VectorXd KktProjector::project(const Eigen::VectorXd& y, const grid::Topology& topo,
                                      const powerflow::Injections& inj) const {
  const auto sys = build_conservation_constraints(*case_, topo, inj);
  return apply(y, sys, factor_for(topo, sys)->llt);
}

powerflow::LineFlows KktProjector::project(const powerflow::LineFlows& pred, const grid::Topology& topo,
                                           const powerflow::Injections& inj) const {
  if (pred.p_or.size() != case_->line_count()) throw ValidationError("prediction does not match the case line count");
  powerflow::LineFlows out = pred;
  unflatten_active_power(project(flatten_active_power(pred), topo, inj), out);
  return out;
}

std::size_t KktProjector::cached_topologies() const {
  std::lock_guard lock(mutex_);
  return cache_.size();
}

}  // namespace gridbench::surrogate
