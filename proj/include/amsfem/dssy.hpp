#pragma once

// DSSY rectangular nonconforming element: one DOF per edge (edge mean, which
// coincides with the midpoint value), quartic shape functions built from the
// bubble theta(t) = t^2 - 5/3 t^4.

#include "amsfem/mesh.hpp"
#include "amsfem/types.hpp"

#include <functional>

namespace amsfem {

using ScalarField = std::function<double(double x, double y)>;

namespace dssy {

/// Local DOF order used by every 4x4 element matrix.
enum LocalDof : int { left = 0, right = 1, bottom = 2, top = 3 };

struct BasisEval {
  double value;
  Eigen::Vector2d gradient;
};

/// Shape function `local_dof` at (x, y), measured from the element center of
/// an hx-by-hy rectangle.
BasisEval eval_basis(int local_dof, double x, double y, double hx, double hy);

using LocalMatrix = Eigen::Matrix4d;
using LocalVector = Eigen::Vector4d;

/// kappa * (grad phi_a, grad phi_b) by 5x5 Gauss quadrature.
LocalMatrix local_stiffness(double hx, double hy, double kappa);
/// kappa * (phi_a, phi_b) by 5x5 Gauss quadrature.
LocalMatrix local_mass(double hx, double hy, double kappa);
/// (f, phi_a) on the element with lower-left corner (x0, y0).
LocalVector local_load(double x0, double y0, double hx, double hy, const ScalarField& f,
                       int order = 5);

}  // namespace dssy

/// Micro-scale linear system over the interior DOFs of a DofLayout.
struct SparseSystem {
  SparseMatrix A;
  Vector b;
};

SparseMatrix assemble_stiffness(const MicroMesh& mesh, const DofLayout& layout,
                                const CellField& kappa);
Vector load_vector(const MicroMesh& mesh, const DofLayout& layout, const ScalarField& f,
                   int order = 5);
SparseSystem assemble_micro_system(const MicroMesh& mesh, const DofLayout& layout,
                                   const CellField& kappa, const ScalarField& f);

/// Stiffness / kappa-weighted mass over all DOFs of a patch (boundary included).
SparseMatrix patch_stiffness(const Patch& patch, const ElementData& data);
SparseMatrix patch_mass(const Patch& patch, const ElementData& data);

}  // namespace amsfem
