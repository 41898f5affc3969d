#include "amsfem/local_spaces.hpp"

#include "amsfem/dssy.hpp"
#include "amsfem/numerics.hpp"

#include <string>

namespace amsfem {

LocalOperators local_operators(const CellBlock& block, const ElementData& data) {
  Patch patch(block);
  SparseMatrix k = patch_stiffness(patch, data);
  SparseMatrix m = patch_mass(patch, data);
  return {std::move(patch), std::move(k), std::move(m)};
}

Matrix harmonic_extensions(const Patch& patch, const SparseMatrix& stiffness) {
  const auto& bdry = patch.boundary_dofs();
  const auto& inner = patch.interior_dofs();
  const int n = patch.size();
  const int nb = static_cast<int>(bdry.size());
  const int ni = static_cast<int>(inner.size());

  Matrix out = Matrix::Zero(n, nb);
  for (int l = 0; l < nb; ++l) out(bdry[l], l) = 1.0;
  if (ni == 0) return out;

  // position of each local DOF inside the interior / boundary lists
  std::vector<int> pos(n, -1);
  for (int i = 0; i < ni; ++i) pos[inner[i]] = i;
  for (int l = 0; l < nb; ++l) pos[bdry[l]] = l;

  std::vector<Triplet> aii;
  Matrix rhs = Matrix::Zero(ni, nb);
  for (int col = 0; col < stiffness.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(stiffness, col); it; ++it) {
      const int r = static_cast<int>(it.row());
      if (patch.is_boundary(r)) continue;
      if (patch.is_boundary(col)) {
        rhs(pos[r], pos[col]) -= it.value();
      } else {
        aii.emplace_back(pos[r], pos[col], it.value());
      }
    }
  }
  SparseMatrix Aii(ni, ni);
  Aii.setFromTriplets(aii.begin(), aii.end());
  Matrix interior;
  try {
    interior = numerics::SparseSpdSolver(Aii).solve(rhs);
  } catch (const NumericalError& e) {
    throw NumericalError(std::string("singular local harmonic problem: ") + e.what());
  }
  for (int i = 0; i < ni; ++i) out.row(inner[i]) = interior.row(i);
  return out;
}

SnapshotSpace snapshot_space(const MacroMesh& macro, int element, const ElementData& data) {
  return oversampled_snapshot_space(macro, element, data, 0);
}

SnapshotSpace oversampled_snapshot_space(const MacroMesh& macro, int element,
                                         const ElementData& data, int layers) {
  if (layers < 0) throw ConfigError("oversampling layers must be >= 0");
  const CellBlock& cells = macro.element(element).cells;
  SnapshotSpace snap{element, Patch(cells), {}, {}, layers};
  snap.boundary_dofs = snap.patch.boundary_dofs();

  const CellBlock big = cells.grown(layers, macro.micro_nx(), macro.micro_ny());
  Patch outer(big);
  const SparseMatrix k = patch_stiffness(outer, data);
  const Matrix ext = harmonic_extensions(outer, k);
  if (big == cells) {
    snap.functions = ext;
    return snap;
  }
  snap.functions.resize(snap.patch.size(), ext.cols());
  for (int i = 0; i < snap.patch.size(); ++i) {
    snap.functions.row(i) = ext.row(outer.index(snap.patch.label(i)));
  }
  return snap;
}

OfflineSpace offline_space(const SnapshotSpace& snap, const LocalOperators& ops, int L) {
  const int nsnap = static_cast<int>(snap.functions.cols());
  if (L < 1 || L > nsnap) {
    throw ConfigError("offline dimension " + std::to_string(L) + " outside 1.." +
                      std::to_string(nsnap));
  }
  if (!(ops.patch.block() == snap.patch.block())) {
    throw ConfigError("local operators do not belong to the snapshot patch");
  }
  const Matrix& S = snap.functions;
  const Matrix K = S.transpose() * (ops.stiffness * S);
  const Matrix M = S.transpose() * (ops.mass * S);
  const auto pairs = numerics::sym_generalized_eig(K, M);
  OfflineSpace off;
  off.owner = snap.owner;
  off.deflated = pairs.deflated;
  off.eigenvalues = pairs.values;
  const int kept = std::min<int>(L, static_cast<int>(pairs.values.size()));
  off.modes = S * pairs.vectors.leftCols(kept);
  return off;
}

}  // namespace amsfem
