#include "gridbench/contingency/pcg.hpp"

#include <algorithm>
#include <cmath>

#include "gridbench/error.hpp"
#include "gridbench/parallel.hpp"

namespace gridbench::contingency {

BlockSolveResult pcg_solve_block(const Eigen::SparseMatrix<double>& a, const Eigen::VectorXd& b, double tol,
                                 int max_iter, std::vector<double>* history) {
  BlockSolveResult res;
  const Eigen::Index n = a.cols();
  res.x = Eigen::VectorXd::Zero(n);
  const double b_norm = b.norm();
  if (b_norm == 0.0) {
    res.converged = true;
    return res;
  }

  Eigen::VectorXd inv_diag(n);
  for (Eigen::Index col = 0; col < n; ++col) {
    const double sq = a.col(col).squaredNorm();
    inv_diag[col] = sq > 0.0 ? 1.0 / sq : 1.0;
  }

  Eigen::VectorXd r = b;
  Eigen::VectorXd z = a.transpose() * r;
  Eigen::VectorXd s = inv_diag.cwiseProduct(z);
  Eigen::VectorXd p = s;
  double gamma = z.dot(s);
  res.relative_residual = 1.0;

  for (int it = 0; it < max_iter; ++it) {
    if (gamma <= 0.0) break;  // breakdown: A^T r = 0 with r != 0
    const Eigen::VectorXd w = a * p;
    const double ww = w.squaredNorm();
    if (ww <= 0.0) break;
    const double alpha = gamma / ww;
    res.x.noalias() += alpha * p;
    r.noalias() -= alpha * w;
    res.iterations = it + 1;
    res.relative_residual = r.norm() / b_norm;
    if (history) history->push_back(res.relative_residual);
    if (res.relative_residual < tol) {
      res.converged = true;
      return res;
    }
    z.noalias() = a.transpose() * r;
    s = inv_diag.cwiseProduct(z);
    const double gamma_next = z.dot(s);
    p = s + (gamma_next / gamma) * p;
    gamma = gamma_next;
  }
  return res;
}

PcgResult pcg_solve(const BlockSystem& system, double tol, int max_iter, std::size_t jobs) {
  if (!(tol > 0.0)) throw ValidationError("PCG tolerance must be positive");
  if (max_iter < 1) throw ValidationError("PCG max_iter must be at least 1");
  PcgResult out;
  out.blocks.resize(system.block_count());
  parallel_for(system.block_count(), jobs, [&](std::size_t i) {
    out.blocks[i] = pcg_solve_block(system.blocks[i], system.rhs[i], tol, max_iter);
  });
  const auto off = system.offsets();
  out.x.resize(off.back());
  out.converged = true;
  for (std::size_t i = 0; i < out.blocks.size(); ++i) {
    out.x.segment(off[i], out.blocks[i].x.size()) = out.blocks[i].x;
    out.worst_residual = std::max(out.worst_residual, out.blocks[i].relative_residual);
    out.converged = out.converged && out.blocks[i].converged;
  }
  return out;
}

}  // namespace gridbench::contingency
