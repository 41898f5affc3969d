#pragma once

// End-to-end multiscale solve of an assembled system: snapshots, moment
// spaces, offline spaces, glued coarse basis, Galerkin coarse solve.

#include "amsfem/coarse.hpp"
#include "amsfem/dssy.hpp"
#include "amsfem/local_spaces.hpp"
#include "amsfem/mesh.hpp"
#include "amsfem/moments.hpp"

#include <vector>

namespace amsfem {

struct MultiscaleOptions {
  MomentMethod moment = MomentMethod::snapshot_trace;
  int LE = 0;                 // moment modes per macro edge; <= 0 keeps every mode
  int extra_modes = 0;        // offline modes beyond the sum of the edge moment counts
  int layers = 0;             // snapshot oversampling layers
  int moment_layers = 1;      // neighbourhood growth for harmonic moments
  int direct_limit = 100000;  // coarse unknowns solved by sparse Cholesky
};

struct MultiscaleResult {
  std::vector<SnapshotSpace> snapshots;
  std::vector<MomentSpace> moments;
  std::vector<OfflineSpace> offline;
  CoarseBasis basis;
  CoarseSystem coarse;
  CoarseSolution solution;

  int dimension() const { return static_cast<int>(coarse.A.rows()); }
};

/// `data` supplies the element sizes and coefficients used for every local
/// problem; the coarse system itself is always R A R^T, R b.
MultiscaleResult solve_multiscale(const SparseSystem& system, const DofLayout& layout,
                                  const MacroMesh& macro, const ElementData& data,
                                  const MultiscaleOptions& options = {});

}  // namespace amsfem
