#pragma once

// Per-macro-element snapshot spaces (discrete kappa-harmonic extensions of
// boundary DOF indicators) and offline spaces (low-energy modes of the
// stiffness/mass pencil on the snapshot span).

#include "amsfem/mesh.hpp"
#include "amsfem/types.hpp"

#include <vector>

namespace amsfem {

/// Stiffness and kappa-weighted mass of V_h(patch), all patch DOFs included.
struct LocalOperators {
  Patch patch;
  SparseMatrix stiffness;
  SparseMatrix mass;
};

LocalOperators local_operators(const CellBlock& block, const ElementData& data);

/// Discrete harmonic extensions of the patch boundary indicators: column l
/// equals delta_l on the boundary DOFs (patch.boundary_dofs()[l]) and solves
/// the homogeneous local system on the interior DOFs.
Matrix harmonic_extensions(const Patch& patch, const SparseMatrix& stiffness);

struct SnapshotSpace {
  int owner = -1;  // macro element id
  Patch patch;     // V_h(T) numbering of `functions` rows
  std::vector<int> boundary_dofs;  // local indices of the dT DOFs, canonical order
  Matrix functions;                // patch.size() x N_snap
  int oversampling_layers = 0;
};

SnapshotSpace snapshot_space(const MacroMesh& macro, int element, const ElementData& data);

/// Harmonic extensions computed on T grown by `layers` element rings
/// (clipped at the domain boundary) and restricted to T.
SnapshotSpace oversampled_snapshot_space(const MacroMesh& macro, int element,
                                         const ElementData& data, int layers);

struct OfflineSpace {
  int owner = -1;
  Vector eigenvalues;  // all retained eigenvalues, ascending
  Matrix modes;        // patch.size() x L, (kappa u, u)_T = 1
  int deflated = 0;    // snapshot directions dropped for a singular mass Gram
};

/// Keeps the L smallest-eigenvalue modes of a_T(u, v) = lambda (kappa u, v)_T
/// on the snapshot span. `ops` must be the local operators of snap.patch.
OfflineSpace offline_space(const SnapshotSpace& snap, const LocalOperators& ops, int L);

}  // namespace amsfem
