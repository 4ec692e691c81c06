#pragma once

#include "hardy/assembly.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace hardy {

/// Solves M x = rhs by Jacobi-preconditioned conjugate gradients with
/// relative residual tol and at most 50 n iterations.
Eigen::VectorXd cg_solve(const SpMat& M, const Eigen::VectorXd& rhs, double tol);

struct EigenResult {
  double lambda_min = 0.0;
  Eigen::VectorXd vector;  // B-normalized
  double residual = 0.0;   // |A x - l B x| / |B x| in the diagonally scaled pencil
  int iterations = 0;
  bool converged = false;
  double shift = 0.0;      // final shift (scaled pencil), below lambda_min
};

enum class InnerSolver { Direct, ConjugateGradient };

struct EigenOptions {
  int block_size = 6;
  int max_iterations = 500;
  InnerSolver inner = InnerSolver::Direct;
  double inner_tol = 1e-12;
  bool relative_residual = false;  // residual divided by max(1, |lambda|)
};

/// Smallest eigenpair of A x = l B x with B positive definite and A
/// symmetric (indefinite A is allowed with the direct inner solver).
EigenResult smallest_eigenpair(const SpMat& A, const SpMat& B, double tol, std::uint64_t seed,
                               const EigenOptions& options = {});

double rayleigh_quotient(const SpMat& A, const SpMat& B, const Eigen::VectorXd& x);

/// Number of eigenvalues of the pencil (A, B) below sigma (Sylvester inertia).
int count_below(const SpMat& A, const SpMat& B, double sigma);

}  // namespace hardy
