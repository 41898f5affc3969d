#pragma once

#include "amsfem/mesh.hpp"
#include "amsfem/types.hpp"

#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace amsfem::testing {

/// Strictly increasing coordinates on [0, 1] with cell sizes varying by up
/// to a factor of `spread`.
inline std::vector<double> random_coords(int n, std::mt19937& rng, double spread = 4.0) {
  std::uniform_real_distribution<double> u(1.0, spread);
  std::vector<double> w(n);
  double total = 0.0;
  for (double& v : w) total += (v = u(rng));
  std::vector<double> c(n + 1, 0.0);
  for (int i = 0; i < n; ++i) c[i + 1] = c[i] + w[i] / total;
  c[n] = 1.0;
  return c;
}

inline MicroMesh random_mesh(int nx, int ny, std::mt19937& rng, double spread = 4.0) {
  return MicroMesh(random_coords(nx, rng, spread), random_coords(ny, rng, spread));
}

/// log-uniform values in [lo, hi]
inline CellField random_kappa(int nx, int ny, std::mt19937& rng, double lo = 1e-2,
                              double hi = 1e2) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  CellField k(nx, ny);
  for (int kk = 1; kk <= ny; ++kk) {
    for (int j = 1; j <= nx; ++j) k(j, kk) = std::exp(u(rng));
  }
  return k;
}

inline double rel_diff(double a, double b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

/// Orthogonal projector onto the column span of X (X need not be orthonormal).
inline Matrix projector(const Matrix& X) {
  Eigen::JacobiSVD<Matrix> svd(X, Eigen::ComputeThinU);
  const double tol = 1e-10 * svd.singularValues()[0];
  int r = 0;
  while (r < svd.singularValues().size() && svd.singularValues()[r] > tol) ++r;
  const Matrix U = svd.matrixU().leftCols(r);
  return U * U.transpose();
}

/// Fresh scratch directory under the system temp dir, private to this process.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() /
                 ("amsfem_test_" + std::to_string(::getpid()) + "_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace amsfem::testing
