#pragma once

#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "gridbench/contingency/block_system.hpp"

namespace gridbench::contingency {

struct BlockSolveResult {
  Eigen::VectorXd x;
  int iterations = 0;
  double relative_residual = 0.0;  // ||b - A x|| / ||b||
  bool converged = false;
};

/// Conjugate gradient on the normal equations A^T A x = A^T b (CGNR) with a
/// Jacobi preconditioner diag(A^T A), i.e. squared column norms. Works for
/// the nonsymmetric Newton blocks; on a symmetric positive definite A it
/// still minimizes ||b - A x|| over the Krylov space, so the residual is
/// non-increasing. Stops when ||b - A x|| / ||b|| < tol, on breakdown, or
/// after max_iter iterations. `history` receives the relative residual after
/// every iteration when non-null.
BlockSolveResult pcg_solve_block(const Eigen::SparseMatrix<double>& a, const Eigen::VectorXd& b, double tol,
                                 int max_iter, std::vector<double>* history = nullptr);

struct PcgResult {
  Eigen::VectorXd x;  // stacked
  std::vector<BlockSolveResult> blocks;
  double worst_residual = 0.0;
  bool converged = false;  // every block reached tol
};

/// Solves every block of `system` independently (blocks spread over `jobs`
/// workers). Throws ValidationError for tol <= 0 or max_iter < 1.
PcgResult pcg_solve(const BlockSystem& system, double tol, int max_iter, std::size_t jobs = 1);

}  // namespace gridbench::contingency
