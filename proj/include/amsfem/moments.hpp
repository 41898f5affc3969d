#pragma once

// Per-macro-edge moment spaces: dominant singular directions of a set of
// edge traces, in the micro-edge-length weighted inner product on E.

#include "amsfem/local_spaces.hpp"
#include "amsfem/mesh.hpp"
#include "amsfem/types.hpp"

#include <span>
#include <string_view>
#include <vector>

namespace amsfem {

enum class MomentMethod { snapshot_trace, harmonic_oversampled };

std::string_view to_string(MomentMethod m);

struct MomentSpace {
  int edge = -1;
  MomentMethod method = MomentMethod::snapshot_trace;
  std::vector<DofLabel> micro_dofs;  // DOFs on E, ordered along the edge
  Vector weights;                    // micro edge lengths
  Vector mu;                         // mu_1 >= ... >= mu_m(E) > 0
  Matrix modes;                      // m_dofs x L(E), ||s_k||_E^2 = mu_k

  int dimension() const { return static_cast<int>(modes.cols()); }
  int rank() const { return static_cast<int>(mu.size()); }
  /// Kept modes rescaled to unit E-norm.
  Matrix normalized_modes() const;
  /// <u, v>_E
  double inner(const Vector& u, const Vector& v) const;
};

/// Edge inner-product weights: lengths of the micro edges lying on E.
Vector edge_weights(const MacroEdge& edge, const ElementData& data);

/// Values of patch functions at the DOFs of E (rows ordered along E).
Matrix edge_traces(const Patch& patch, const Matrix& functions, const MacroEdge& edge);

/// Weighted SVD of an arbitrary trace set; keeps min(L, rank) modes.
/// L <= 0 keeps every nonzero direction.
MomentSpace moment_space_from_traces(const MacroEdge& edge, const Vector& weights,
                                     const Matrix& traces, int L, MomentMethod method);

/// Traces of the snapshot functions of the neighbours of E.
MomentSpace moment_space_traces(const MacroMesh& macro, int edge, const ElementData& data,
                                std::span<const SnapshotSpace* const> neighbor_snapshots, int L);

/// Traces on E of discrete harmonic extensions on omega(E) grown by `layers`.
MomentSpace moment_space_harmonic(const MacroMesh& macro, int edge, const ElementData& data,
                                  int layers, int L);

}  // namespace amsfem
