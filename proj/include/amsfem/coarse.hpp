#pragma once

// Glued multiscale coarse space: edge functions on omega(E) = T1 u T2 and
// macro bubbles, both built as nullspaces of moment constraints on the
// offline spaces, plus the Galerkin coarse system R A R^T.

#include "amsfem/dssy.hpp"
#include "amsfem/local_spaces.hpp"
#include "amsfem/mesh.hpp"
#include "amsfem/moments.hpp"
#include "amsfem/types.hpp"

#include <string_view>
#include <vector>

namespace amsfem {

enum class BasisOrigin { bubble, edge };

std::string_view to_string(BasisOrigin o);

/// Consecutive basis rows sharing provenance and support. Row c of the group is
/// the zero extension of the functions local[s].col(c) on support[s].
struct BasisGroup {
  BasisOrigin origin = BasisOrigin::edge;
  int owner = -1;            // macro edge or macro element id
  std::vector<int> support;  // macro elements
  std::vector<Matrix> local; // patch(support[s]).size() x count

  int count() const { return local.empty() ? 0 : static_cast<int>(local.front().cols()); }
};

struct CoarseBasis {
  std::vector<BasisGroup> groups;
  int dropped = 0;  // rows removed by prune_dependent_rows

  int size() const;

  /// Rows of R as global micro-DOF vectors. A DOF shared by two macro
  /// elements takes the average of both sides (zero outside the support);
  /// Dirichlet DOFs are dropped. Exact when jumps vanish at micro DOFs.
  SparseMatrix restriction(const MacroMesh& macro, const DofLayout& layout) const;
};

/// Relative tolerance of the constraint nullspaces.
inline constexpr double kNullspaceTol = 1e-10;

/// Constraint rows <tr_E u, zeta>_E for the offline modes of `element` against
/// the unit-normalized moment modes of macro edge `edge`.
Matrix moment_constraints(const MacroMesh& macro, int element, int edge,
                          const OfflineSpace& offline, const MomentSpace& moment);

/// V^H(omega(E)): jump-orthogonality on E and trace-orthogonality on the
/// remaining edges of T1 and T2. Throws ConfigError if the nullspace is
/// smaller than L(E).
BasisGroup glue_edge_space(const MacroMesh& macro, int edge,
                           const std::vector<OfflineSpace>& offline,
                           const std::vector<MomentSpace>& moments);

/// B_H(T): offline functions with vanishing moments on every edge of T.
BasisGroup bubble_space(const MacroMesh& macro, int element,
                        const std::vector<OfflineSpace>& offline,
                        const std::vector<MomentSpace>& moments);

/// Largest |<[u]_E, zeta>_E| over all rows of the group, all moment modes and
/// every macro edge touching the support (boundary edges use the trace).
double constraint_residual(const MacroMesh& macro, const BasisGroup& group,
                           const std::vector<MomentSpace>& moments);

/// Bubbles for every element, then edge spaces for every interior edge.
CoarseBasis build_coarse_basis(const MacroMesh& macro, const std::vector<OfflineSpace>& offline,
                               const std::vector<MomentSpace>& moments);

struct CoarseSystem {
  SparseMatrix R;  // coarse rows x micro DOFs
  SparseMatrix A;  // R A_h R^T
  Vector b;        // R b_h
};

/// Galerkin coarsening of the given algebraic system.
CoarseSystem assemble_coarse(const SparseMatrix& R, const SparseSystem& system);

/// Independence check on the assembled system: rows are visited in basis
/// order and a row is dropped when its energy pivot against the earlier
/// accepted rows near it falls below rel_tol times its own energy. "Near"
/// means supported on a macro element that shares a vertex with the row's
/// support, which covers the edge cycles around a macro vertex.
/// Updates the basis and the system; returns the number dropped.
int prune_dependent_rows(const MacroMesh& macro, CoarseBasis& basis, CoarseSystem& cs,
                         double rel_tol = 1e-13);

struct CoarseSolution {
  Vector coefficients;
  Vector prolonged;  // R^T coefficients
  double relative_residual = 0.0;
  bool iterative = false;
};

/// Sparse Cholesky below `direct_limit` unknowns, conjugate gradients above.
CoarseSolution solve_coarse(const CoarseSystem& cs, int direct_limit = 100000);

}  // namespace amsfem
