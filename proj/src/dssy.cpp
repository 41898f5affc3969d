#include "amsfem/dssy.hpp"

#include "amsfem/quadrature.hpp"

#include <string>

namespace amsfem {
namespace dssy {

namespace {

constexpr double kTheta1 = 1.0 - 5.0 / 3.0;

double theta(double t) { return t * t - (5.0 / 3.0) * t * t * t * t; }
double dtheta(double t) { return 2.0 * t - (20.0 / 3.0) * t * t * t; }

void check_element(double hx, double hy, double kappa) {
  if (!(hx > 0.0) || !(hy > 0.0)) throw ConfigError("element sizes must be positive");
  if (!(kappa > 0.0)) throw ConfigError("coefficient must be positive");
}

}  // namespace

BasisEval eval_basis(int local_dof, double x, double y, double hx, double hy) {
  const double s = 2.0 * x / hx;
  const double t = 2.0 * y / hy;
  const double bubble = (theta(s) - theta(t)) / (4.0 * kTheta1);
  const double bx = dtheta(s) / (2.0 * hx * kTheta1);
  const double by = dtheta(t) / (2.0 * hy * kTheta1);
  switch (local_dof) {
    case left:
      return {0.25 - x / hx + bubble, {-1.0 / hx + bx, -by}};
    case right:
      return {0.25 + x / hx + bubble, {1.0 / hx + bx, -by}};
    case bottom:
      return {0.25 - y / hy - bubble, {-bx, -1.0 / hy + by}};
    case top:
      return {0.25 + y / hy - bubble, {-bx, 1.0 / hy + by}};
    default:
      throw ConfigError("local DOF must be 0..3, got " + std::to_string(local_dof));
  }
}

LocalMatrix local_stiffness(double hx, double hy, double kappa) {
  check_element(hx, hy, kappa);
  const GaussRule& g = gauss_legendre(5);
  LocalMatrix k = LocalMatrix::Zero();
  for (std::size_t qx = 0; qx < g.points.size(); ++qx) {
    for (std::size_t qy = 0; qy < g.points.size(); ++qy) {
      const double x = 0.5 * hx * g.points[qx];
      const double y = 0.5 * hy * g.points[qy];
      const double w = 0.25 * hx * hy * g.weights[qx] * g.weights[qy];
      Eigen::Matrix<double, 2, 4> grads;
      for (int a = 0; a < 4; ++a) grads.col(a) = eval_basis(a, x, y, hx, hy).gradient;
      k.noalias() += w * grads.transpose() * grads;
    }
  }
  k = k.selfadjointView<Eigen::Upper>();
  return kappa * k;
}

LocalMatrix local_mass(double hx, double hy, double kappa) {
  check_element(hx, hy, kappa);
  const GaussRule& g = gauss_legendre(5);
  LocalMatrix m = LocalMatrix::Zero();
  for (std::size_t qx = 0; qx < g.points.size(); ++qx) {
    for (std::size_t qy = 0; qy < g.points.size(); ++qy) {
      const double x = 0.5 * hx * g.points[qx];
      const double y = 0.5 * hy * g.points[qy];
      const double w = 0.25 * hx * hy * g.weights[qx] * g.weights[qy];
      LocalVector v;
      for (int a = 0; a < 4; ++a) v[a] = eval_basis(a, x, y, hx, hy).value;
      m.noalias() += w * v * v.transpose();
    }
  }
  m = m.selfadjointView<Eigen::Upper>();
  return kappa * m;
}

LocalVector local_load(double x0, double y0, double hx, double hy, const ScalarField& f,
                       int order) {
  const GaussRule& g = gauss_legendre(order);
  LocalVector out = LocalVector::Zero();
  const double cx = x0 + 0.5 * hx;
  const double cy = y0 + 0.5 * hy;
  for (std::size_t qx = 0; qx < g.points.size(); ++qx) {
    for (std::size_t qy = 0; qy < g.points.size(); ++qy) {
      const double x = 0.5 * hx * g.points[qx];
      const double y = 0.5 * hy * g.points[qy];
      const double w = 0.25 * hx * hy * g.weights[qx] * g.weights[qy] * f(cx + x, cy + y);
      for (int a = 0; a < 4; ++a) out[a] += w * eval_basis(a, x, y, hx, hy).value;
    }
  }
  return out;
}

}  // namespace dssy

SparseMatrix assemble_stiffness(const MicroMesh& mesh, const DofLayout& layout,
                                const CellField& kappa) {
  if (kappa.nx() != mesh.nx() || kappa.ny() != mesh.ny()) {
    throw ConfigError("kappa field is " + std::to_string(kappa.nx()) + "x" +
                      std::to_string(kappa.ny()) + ", mesh is " + std::to_string(mesh.nx()) +
                      "x" + std::to_string(mesh.ny()));
  }
  if (layout.nx() != mesh.nx() || layout.ny() != mesh.ny()) {
    throw ConfigError("DOF layout does not match the mesh");
  }
  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(mesh.nx()) * mesh.ny() * 16);
  for (int k = 1; k <= mesh.ny(); ++k) {
    for (int j = 1; j <= mesh.nx(); ++j) {
      const auto ke = dssy::local_stiffness(mesh.hx(j), mesh.hy(k), kappa(j, k));
      const auto dofs = layout.element_dofs(j, k);
      for (int a = 0; a < 4; ++a) {
        if (!dofs[a]) continue;
        for (int b = 0; b < 4; ++b) {
          if (dofs[b]) triplets.emplace_back(*dofs[a], *dofs[b], ke(a, b));
        }
      }
    }
  }
  SparseMatrix A(layout.size(), layout.size());
  A.setFromTriplets(triplets.begin(), triplets.end());
  return A;
}

Vector load_vector(const MicroMesh& mesh, const DofLayout& layout, const ScalarField& f,
                   int order) {
  Vector b = Vector::Zero(layout.size());
  for (int k = 1; k <= mesh.ny(); ++k) {
    for (int j = 1; j <= mesh.nx(); ++j) {
      const auto fe =
          dssy::local_load(mesh.x(j - 1), mesh.y(k - 1), mesh.hx(j), mesh.hy(k), f, order);
      const auto dofs = layout.element_dofs(j, k);
      for (int a = 0; a < 4; ++a) {
        if (dofs[a]) b[*dofs[a]] += fe[a];
      }
    }
  }
  return b;
}

SparseSystem assemble_micro_system(const MicroMesh& mesh, const DofLayout& layout,
                                   const CellField& kappa, const ScalarField& f) {
  return {assemble_stiffness(mesh, layout, kappa), load_vector(mesh, layout, f)};
}

namespace {

template <class Kernel>
SparseMatrix assemble_patch(const Patch& patch, const ElementData& data, Kernel kernel) {
  const CellBlock& b = patch.block();
  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(b.nx()) * b.ny() * 16);
  for (int k = b.y0 + 1; k <= b.y1; ++k) {
    for (int j = b.x0 + 1; j <= b.x1; ++j) {
      const auto ke = kernel(data.width(j), data.height(k), data.kappa(j, k));
      const auto dofs = patch.element_dofs(j, k);
      for (int a = 0; a < 4; ++a) {
        for (int c = 0; c < 4; ++c) triplets.emplace_back(dofs[a], dofs[c], ke(a, c));
      }
    }
  }
  SparseMatrix m(patch.size(), patch.size());
  m.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

}  // namespace

SparseMatrix patch_stiffness(const Patch& patch, const ElementData& data) {
  return assemble_patch(patch, data, dssy::local_stiffness);
}

SparseMatrix patch_mass(const Patch& patch, const ElementData& data) {
  return assemble_patch(patch, data, dssy::local_mass);
}

}  // namespace amsfem
