#pragma once

// Rectangular tensor-product micro meshes, macro blockings and the edge-based
// DOF numbering shared by every other module.
//
// Indexing conventions (all 1-based in (j, k), matching the element labels):
//   element Omega_{jk} = (x_{j-1}, x_j) x (y_{k-1}, y_k),  j = 1..nx, k = 1..ny
//   alpha DOF (j, k): vertical edge e_{jk} at x = x_j,   j = 0..nx, k = 1..ny
//   beta  DOF (j, k): horizontal edge f_{jk} at y = y_k, j = 1..nx, k = 0..ny
// Global interior numbering: alpha block first, then beta block, each
// row-major (k outer, j inner).

#include "amsfem/types.hpp"

#include <array>
#include <compare>
#include <optional>
#include <vector>

namespace amsfem {

enum class DofKind { alpha, beta };

struct DofLabel {
  DofKind kind;
  int j;
  int k;
  auto operator<=>(const DofLabel&) const = default;
};

/// Piecewise-constant per-element field, stored row-major (k outer).
class CellField {
 public:
  CellField() = default;
  CellField(int nx, int ny, double value = 0.0);
  CellField(int nx, int ny, std::vector<double> row_major);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double& operator()(int j, int k) { return data_[offset(j, k)]; }
  double operator()(int j, int k) const { return data_[offset(j, k)]; }
  const std::vector<double>& values() const { return data_; }

 private:
  std::size_t offset(int j, int k) const {
    return static_cast<std::size_t>(k - 1) * nx_ + static_cast<std::size_t>(j - 1);
  }
  int nx_ = 0;
  int ny_ = 0;
  std::vector<double> data_;
};

class MicroMesh {
 public:
  /// Throws ConfigError("non-monotone at index i") for non-increasing input.
  MicroMesh(std::vector<double> x_coords, std::vector<double> y_coords);

  static MicroMesh uniform(int nx, int ny, double width = 1.0, double height = 1.0);

  int nx() const { return static_cast<int>(x_.size()) - 1; }
  int ny() const { return static_cast<int>(y_.size()) - 1; }
  double x(int j) const { return x_[j]; }
  double y(int k) const { return y_[k]; }
  double hx(int j) const { return x_[j] - x_[j - 1]; }
  double hy(int k) const { return y_[k] - y_[k - 1]; }
  double gamma(int j, int k) const { return hy(k) / hx(j); }
  double width() const { return x_.back() - x_.front(); }
  double height() const { return y_.back() - y_.front(); }
  std::array<double, 2> center(int j, int k) const {
    return {0.5 * (x_[j - 1] + x_[j]), 0.5 * (y_[k - 1] + y_[k])};
  }
  const std::vector<double>& x_coords() const { return x_; }
  const std::vector<double>& y_coords() const { return y_; }

 private:
  std::vector<double> x_;
  std::vector<double> y_;
};

/// Validates nx/ny against the coordinate list lengths, then builds the mesh.
MicroMesh build_micro_mesh(int nx, int ny, std::vector<double> x_coords,
                           std::vector<double> y_coords);

/// Per-element geometry and coefficient: everything the local DSSY kernels need.
/// Produced either from ground truth or from algebraic recovery.
struct ElementData {
  std::vector<double> hx;  // size nx, hx[j-1]
  std::vector<double> hy;  // size ny, hy[k-1]
  CellField kappa;

  int nx() const { return static_cast<int>(hx.size()); }
  int ny() const { return static_cast<int>(hy.size()); }
  double width(int j) const { return hx[j - 1]; }
  double height(int k) const { return hy[k - 1]; }

  static ElementData from_mesh(const MicroMesh& mesh, CellField kappa);
};

class DofLayout {
 public:
  DofLayout(int nx, int ny);
  explicit DofLayout(const MicroMesh& mesh) : DofLayout(mesh.nx(), mesh.ny()) {}

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int num_alpha() const { return (nx_ - 1) * ny_; }
  int num_beta() const { return nx_ * (ny_ - 1); }
  int size() const { return num_alpha() + num_beta(); }

  /// Global row of an edge DOF, or nullopt for a Dirichlet boundary edge.
  /// Throws ConfigError if (j, k) lies outside the edge ranges.
  std::optional<int> index(DofKind kind, int j, int k) const;
  std::optional<int> index(const DofLabel& l) const { return index(l.kind, l.j, l.k); }
  DofLabel label(int index) const;

  /// (left, right, bottom, top) DOFs of element (j, k); nullopt on the boundary.
  std::array<std::optional<int>, 4> element_dofs(int j, int k) const;

 private:
  int nx_;
  int ny_;
};

/// Block of micro elements with columns x0+1..x1 and rows y0+1..y1.
struct CellBlock {
  int x0 = 0;
  int x1 = 0;
  int y0 = 0;
  int y1 = 0;

  int nx() const { return x1 - x0; }
  int ny() const { return y1 - y0; }
  bool contains(int j, int k) const { return j > x0 && j <= x1 && k > y0 && k <= y1; }
  /// Grown by `layers` element rings, clipped to the 1..nx x 1..ny domain.
  CellBlock grown(int layers, int nx, int ny) const;
  bool operator==(const CellBlock&) const = default;
};

/// Local numbering of V_h(block): every edge of the block, boundary included,
/// in the same alpha-then-beta row-major order as the global layout.
class Patch {
 public:
  explicit Patch(CellBlock block);

  const CellBlock& block() const { return block_; }
  int size() const { return num_alpha_ + num_beta_; }
  /// Local index, or -1 when the edge is not part of the block.
  int index(DofKind kind, int j, int k) const;
  int index(const DofLabel& l) const { return index(l.kind, l.j, l.k); }
  DofLabel label(int local) const;
  bool is_boundary(int local) const { return flags_[local] != 0; }
  const std::vector<int>& boundary_dofs() const { return boundary_; }
  const std::vector<int>& interior_dofs() const { return interior_; }
  std::array<int, 4> element_dofs(int j, int k) const;

 private:
  CellBlock block_;
  int num_alpha_;
  int num_beta_;
  std::vector<int> boundary_;
  std::vector<int> interior_;
  std::vector<char> flags_;
};

enum class EdgeOrientation { vertical, horizontal };

struct MacroEdge {
  int id = -1;
  EdgeOrientation orientation = EdgeOrientation::vertical;
  int line = 0;  // micro grid line carrying the edge
  int from = 0;  // micro cells from+1..to along the edge
  int to = 0;
  std::array<int, 2> neighbors{-1, -1};  // (left|bottom, right|top) macro elements

  bool interior() const { return neighbors[0] >= 0 && neighbors[1] >= 0; }
  int num_micro_edges() const { return to - from; }
  /// Micro edge DOFs lying on the edge, ordered along it.
  std::vector<DofLabel> micro_dofs() const;
};

struct MacroElement {
  int id = -1;
  int col = 0;  // 1-based macro column
  int row = 0;  // 1-based macro row
  CellBlock cells;
  std::array<int, 4> edges{};  // left, right, bottom, top
};

class MacroMesh {
 public:
  /// breaks_x: 0 = b_0 < b_1 < ... < b_Nx = nx (micro line indices), same for y.
  MacroMesh(int nx, int ny, std::vector<int> breaks_x, std::vector<int> breaks_y);

  int micro_nx() const { return nx_; }
  int micro_ny() const { return ny_; }
  int num_cols() const { return static_cast<int>(bx_.size()) - 1; }
  int num_rows() const { return static_cast<int>(by_.size()) - 1; }
  const std::vector<int>& breaks_x() const { return bx_; }
  const std::vector<int>& breaks_y() const { return by_; }

  const std::vector<MacroElement>& elements() const { return elements_; }
  const std::vector<MacroEdge>& edges() const { return edges_; }
  const MacroElement& element(int id) const { return elements_[id]; }
  const MacroEdge& edge(int id) const { return edges_[id]; }
  const std::vector<int>& interior_edges() const { return interior_edges_; }
  int element_at(int col, int row) const { return (row - 1) * num_cols() + (col - 1); }
  /// Macro element owning micro element (j, k).
  int element_containing(int j, int k) const;

 private:
  int nx_;
  int ny_;
  std::vector<int> bx_;
  std::vector<int> by_;
  std::vector<MacroElement> elements_;
  std::vector<MacroEdge> edges_;
  std::vector<int> interior_edges_;
  std::vector<int> col_of_cell_;
  std::vector<int> row_of_cell_;
};

/// Uniform blocking; block sizes must divide nx and ny.
MacroMesh build_macro_mesh(int nx, int ny, int block_x, int block_y);
MacroMesh build_macro_mesh(const MicroMesh& mesh, int block_x, int block_y);

}  // namespace amsfem
