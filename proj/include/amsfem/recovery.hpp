#pragma once

// Reconstruction of element coefficients and mesh geometry from the entries of
// an assembled DSSY stiffness matrix.

#include "amsfem/mesh.hpp"
#include "amsfem/types.hpp"

#include <string_view>
#include <vector>

namespace amsfem {

/// Which same-type entry accompanies the cross entry.
///   beta_pair:  A(f_{j,k-1}, f_{jk})  (bottom/top of the element)
///   alpha_pair: A(e_{j-1,k}, e_{jk})  (left/right of the element)
enum class PairKind { alpha_pair, beta_pair };

enum class Provenance { interior_pair, boundary_pair, corner_ratio };

std::string_view to_string(Provenance p);

struct ElementRecovery {
  double gamma;
  double kappa;
};

/// gamma = h_y/h_x and kappa of one element from a cross entry A(alpha, beta)
/// and the same-type opposite-pair entry of the chosen kind.
ElementRecovery recover_element(double cross, double neighbor, PairKind kind);

struct RecoveredField {
  CellField kappa;
  CellField gamma;
  // h_{x_j} = 1 / sum_k gamma_{jk} and h_{y_k} = 1 / sum_j (1 / gamma_{jk}):
  // the true sizes divided by the domain height and width respectively, so
  // exact on the unit square.
  std::vector<double> hx;
  std::vector<double> hy;
  std::vector<Provenance> provenance;  // row-major like CellField

  int nx() const { return kappa.nx(); }
  int ny() const { return kappa.ny(); }
  Provenance provenance_at(int j, int k) const {
    return provenance[static_cast<std::size_t>(k - 1) * nx() + (j - 1)];
  }
  /// Element data for local assembly; sizes rescaled to the given extents.
  /// With the default unit extents this is the pure matrix-derived geometry.
  ElementData element_data(double width = 1.0, double height = 1.0) const;
};

/// Needs nx, ny >= 3 so that every corner has three non-corner neighbours.
RecoveredField recover_field(const SparseMatrix& A, const DofLayout& layout);

}  // namespace amsfem
