#include "amsfem/numerics.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

#include <cmath>
#include <sstream>

namespace amsfem::numerics {

struct SparseSpdSolver::Impl {
  SparseMatrix A;
  Eigen::SimplicialLLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>> llt;
};

SparseSpdSolver::SparseSpdSolver(const SparseMatrix& A) : impl_(std::make_unique<Impl>()) {
  if (A.rows() != A.cols()) throw ConfigError("sparse solve needs a square matrix");
  impl_->A = A;
  impl_->llt.compute(impl_->A);
  if (impl_->llt.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "matrix is not positive definite (smallest eigenvalue estimate "
        << smallest_eigenvalue_estimate(A) << ")";
    throw NumericalError(msg.str());
  }
}

SparseSpdSolver::~SparseSpdSolver() = default;
SparseSpdSolver::SparseSpdSolver(SparseSpdSolver&&) noexcept = default;
SparseSpdSolver& SparseSpdSolver::operator=(SparseSpdSolver&&) noexcept = default;

int SparseSpdSolver::size() const { return static_cast<int>(impl_->A.rows()); }

Vector SparseSpdSolver::solve(const Vector& b) const {
  Vector x = impl_->llt.solve(b);
  const Vector r = b - impl_->A * x;
  x += impl_->llt.solve(r);
  return x;
}

Matrix SparseSpdSolver::solve(const Matrix& B) const {
  Matrix X = impl_->llt.solve(B);
  const Matrix R = B - impl_->A * X;
  X += impl_->llt.solve(R);
  return X;
}

Matrix sparse_spd_solve(const SparseMatrix& A, const Matrix& B) {
  return SparseSpdSolver(A).solve(B);
}

Vector conjugate_gradient(const SparseMatrix& A, const Vector& b, double rel_tol,
                          int max_iterations) {
  Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper,
                           Eigen::DiagonalPreconditioner<double>>
      cg;
  cg.setTolerance(rel_tol);
  cg.setMaxIterations(max_iterations);
  cg.compute(A);
  Vector x = cg.solve(b);
  if (cg.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "conjugate gradients did not converge (residual " << cg.error()
        << ", smallest eigenvalue estimate " << smallest_eigenvalue_estimate(A) << ")";
    throw NumericalError(msg.str());
  }
  return x;
}

double smallest_eigenvalue_estimate(const SparseMatrix& A, int iterations) {
  const Eigen::Index n = A.rows();
  if (n == 0) return 0.0;
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = 1.0 + 0.01 * static_cast<double>(i % 7);
  v.normalize();
  double top = 0.0;
  for (int it = 0; it < iterations; ++it) {
    Vector w = A * v;
    top = v.dot(w);
    const double nw = w.norm();
    if (nw == 0.0) return 0.0;
    v = w / nw;
  }
  const double shift = std::abs(top);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = 1.0 - 0.01 * static_cast<double>(i % 5);
  v.normalize();
  double lowest = 0.0;
  for (int it = 0; it < iterations; ++it) {
    Vector w = shift * v - A * v;
    lowest = shift - v.dot(w);
    const double nw = w.norm();
    if (nw == 0.0) break;
    v = w / nw;
  }
  return lowest;
}

EigenPairs sym_generalized_eig(const Matrix& K, const Matrix& M, double mass_rel_tol) {
  if (K.rows() != K.cols() || M.rows() != M.cols() || K.rows() != M.rows()) {
    throw ConfigError("pencil matrices must be square and of equal size");
  }
  const Matrix Ms = 0.5 * (M + M.transpose());
  const Matrix Ks = 0.5 * (K + K.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> mass(Ms);
  if (mass.info() != Eigen::Success) throw NumericalError("mass eigendecomposition failed");
  const Vector& mu = mass.eigenvalues();
  const double top = mu.size() ? mu.maxCoeff() : 0.0;
  EigenPairs out;
  if (!(top > 0.0)) {
    out.deflated = static_cast<int>(K.rows());
    out.values.resize(0);
    out.vectors.resize(K.rows(), 0);
    return out;
  }
  std::vector<int> keep;
  for (int i = 0; i < mu.size(); ++i) {
    if (mu[i] > mass_rel_tol * top) keep.push_back(i);
  }
  out.deflated = static_cast<int>(mu.size()) - static_cast<int>(keep.size());
  Matrix B(K.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) {
    B.col(static_cast<Eigen::Index>(c)) =
        mass.eigenvectors().col(keep[c]) / std::sqrt(mu[keep[c]]);
  }
  Matrix reduced = B.transpose() * Ks * B;
  reduced = 0.5 * (reduced + reduced.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(reduced);
  if (eig.info() != Eigen::Success) throw NumericalError("reduced eigenproblem failed");
  out.values = eig.eigenvalues();
  out.vectors = B * eig.eigenvectors();
  return out;
}

Matrix svd_nullspace(const Matrix& C, double rel_tol) {
  const Eigen::Index n = C.cols();
  if (C.rows() == 0 || C.cwiseAbs().maxCoeff() == 0.0) return Matrix::Identity(n, n);
  Eigen::JacobiSVD<Matrix> svd(C, Eigen::ComputeFullV);
  const Vector& s = svd.singularValues();
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s[i] > rel_tol * s[0]) ++rank;
  }
  return svd.matrixV().rightCols(n - rank);
}

WeightedSvd weighted_svd(const Matrix& X, const Vector& weights, double rel_tol) {
  if (weights.size() != X.rows()) throw ConfigError("weight vector does not match rows");
  if ((weights.array() <= 0.0).any()) throw ConfigError("weights must be positive");
  const Vector sqrt_w = weights.cwiseSqrt();
  const Matrix Y = sqrt_w.asDiagonal() * X;
  WeightedSvd out;
  if (Y.size() == 0 || Y.cwiseAbs().maxCoeff() == 0.0) {
    out.singular_values.resize(0);
    out.left.resize(X.rows(), 0);
    return out;
  }
  Eigen::JacobiSVD<Matrix> svd(Y, Eigen::ComputeThinU);
  const Vector& s = svd.singularValues();
  Eigen::Index kept = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s[i] * s[i] >= rel_tol * s[0] * s[0] && s[i] > 0.0) ++kept;
  }
  out.singular_values = s.head(kept);
  out.left = sqrt_w.cwiseInverse().asDiagonal() * svd.matrixU().leftCols(kept);
  return out;
}

}  // namespace amsfem::numerics
