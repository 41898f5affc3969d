#include "amsfem/model_problem.hpp"

#include <cmath>
#include <numbers>

namespace amsfem {

namespace {
constexpr double pi = std::numbers::pi;
}  // namespace

ModelProblem::ModelProblem(double eps) : eps_(eps) {
  if (!(eps >= 0.0) || !std::isfinite(eps)) throw ConfigError("eps must be finite and >= 0");
}

double ModelProblem::kappa(double x, double y) const {
  return 1.0 + (1.0 + x) * (1.0 + y) + eps_ * std::sin(10 * pi * x) * std::sin(5 * pi * y);
}

Eigen::Vector2d ModelProblem::grad_kappa(double x, double y) const {
  return {(1.0 + y) + 10 * pi * eps_ * std::cos(10 * pi * x) * std::sin(5 * pi * y),
          (1.0 + x) + 5 * pi * eps_ * std::sin(10 * pi * x) * std::cos(5 * pi * y)};
}

double ModelProblem::u(double x, double y) const {
  double v = std::sin(3 * pi * x) * y * (1.0 - y);
  if (eps_ > 0.0) v += eps_ * std::sin(pi * x / eps_) * std::sin(pi * y / eps_);
  return v;
}

Eigen::Vector2d ModelProblem::grad_u(double x, double y) const {
  Eigen::Vector2d g(3 * pi * std::cos(3 * pi * x) * y * (1.0 - y),
                    std::sin(3 * pi * x) * (1.0 - 2.0 * y));
  if (eps_ > 0.0) {
    g[0] += pi * std::cos(pi * x / eps_) * std::sin(pi * y / eps_);
    g[1] += pi * std::sin(pi * x / eps_) * std::cos(pi * y / eps_);
  }
  return g;
}

double ModelProblem::laplace_u(double x, double y) const {
  double v = -9 * pi * pi * std::sin(3 * pi * x) * y * (1.0 - y) - 2.0 * std::sin(3 * pi * x);
  if (eps_ > 0.0) v -= 2 * pi * pi / eps_ * std::sin(pi * x / eps_) * std::sin(pi * y / eps_);
  return v;
}

double ModelProblem::f(double x, double y) const {
  return -(grad_kappa(x, y).dot(grad_u(x, y)) + kappa(x, y) * laplace_u(x, y));
}

CellField ModelProblem::sampled_kappa(const MicroMesh& mesh) const {
  CellField k(mesh.nx(), mesh.ny());
  for (int kk = 1; kk <= mesh.ny(); ++kk) {
    for (int j = 1; j <= mesh.nx(); ++j) {
      const auto c = mesh.center(j, kk);
      k(j, kk) = kappa(c[0], c[1]);
    }
  }
  return k;
}

}  // namespace amsfem
