#pragma once

// Dense and sparse linear-algebra kernels shared by the multiscale modules.
// Backed by Eigen; all routines are deterministic for identical inputs.

#include "amsfem/types.hpp"

#include <memory>

namespace amsfem::numerics {

/// Sparse Cholesky factorization, reused across right-hand sides. Each solve
/// applies one step of iterative refinement.
class SparseSpdSolver {
 public:
  /// Throws NumericalError (with a smallest-eigenvalue estimate) when A is
  /// not positive definite.
  explicit SparseSpdSolver(const SparseMatrix& A);
  ~SparseSpdSolver();
  SparseSpdSolver(SparseSpdSolver&&) noexcept;
  SparseSpdSolver& operator=(SparseSpdSolver&&) noexcept;

  Vector solve(const Vector& b) const;
  Matrix solve(const Matrix& B) const;
  int size() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

Matrix sparse_spd_solve(const SparseMatrix& A, const Matrix& B);

/// Conjugate gradients with a diagonal preconditioner, for systems too large
/// to factor.
Vector conjugate_gradient(const SparseMatrix& A, const Vector& b, double rel_tol = 1e-13,
                          int max_iterations = 100000);

/// Estimate of the smallest eigenvalue of a symmetric matrix (Lanczos-free:
/// shifted power iteration), used for indefiniteness diagnostics.
double smallest_eigenvalue_estimate(const SparseMatrix& A, int iterations = 300);

struct EigenPairs {
  Vector values;   // ascending
  Matrix vectors;  // columns, v^T M v = 1
  int deflated = 0;  // mass null directions removed before solving
};

/// K v = lambda M v for symmetric K and symmetric positive semi-definite M.
/// Directions where M has eigenvalues below mass_rel_tol * max are deflated.
EigenPairs sym_generalized_eig(const Matrix& K, const Matrix& M, double mass_rel_tol = 1e-12);

/// Orthonormal basis of {x : C x = 0}: right singular vectors whose singular
/// value is at most rel_tol times the largest one.
Matrix svd_nullspace(const Matrix& C, double rel_tol);

struct WeightedSvd {
  Vector singular_values;  // descending, all retained
  Matrix left;             // columns orthonormal in the weighted inner product
};

/// SVD of X with the inner product <u, v> = sum_i w_i u_i v_i on its column
/// space: singular values s_k and W-orthonormal directions q_k with
/// X X^T W q_k = s_k^2 q_k. Directions with s_k^2 < rel_tol * s_1^2 are dropped.
WeightedSvd weighted_svd(const Matrix& X, const Vector& weights, double rel_tol);

}  // namespace amsfem::numerics
