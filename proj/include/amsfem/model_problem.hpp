#pragma once

// Benchmark problem on the unit square:
//   kappa(x, y) = 1 + (1 + x)(1 + y) + eps sin(10 pi x) sin(5 pi y)
//   u(x, y)     = sin(3 pi x) y (1 - y) + eps sin(pi x / eps) sin(pi y / eps)
//   f           = -div(kappa grad u)
// The oscillatory term of u is absent for eps = 0.

#include "amsfem/mesh.hpp"
#include "amsfem/types.hpp"

namespace amsfem {

class ModelProblem {
 public:
  explicit ModelProblem(double eps);

  double eps() const { return eps_; }
  double kappa(double x, double y) const;
  Eigen::Vector2d grad_kappa(double x, double y) const;
  double u(double x, double y) const;
  Eigen::Vector2d grad_u(double x, double y) const;
  double laplace_u(double x, double y) const;
  double f(double x, double y) const;

  /// kappa sampled at the micro element centers.
  CellField sampled_kappa(const MicroMesh& mesh) const;

 private:
  double eps_;
};

}  // namespace amsfem
