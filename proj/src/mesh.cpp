#include "amsfem/mesh.hpp"

#include <algorithm>
#include <string>

namespace amsfem {

CellField::CellField(int nx, int ny, double value)
    : nx_(nx), ny_(ny), data_(static_cast<std::size_t>(nx) * ny, value) {}

CellField::CellField(int nx, int ny, std::vector<double> row_major)
    : nx_(nx), ny_(ny), data_(std::move(row_major)) {
  if (data_.size() != static_cast<std::size_t>(nx) * ny) {
    throw ConfigError("cell field has " + std::to_string(data_.size()) + " values, expected " +
                      std::to_string(nx) + "x" + std::to_string(ny));
  }
}

namespace {

void check_monotone(const std::vector<double>& c, const char* axis) {
  if (c.size() < 3) {
    throw ConfigError(std::string(axis) + " coordinates: need at least 2 elements");
  }
  for (std::size_t i = 1; i < c.size(); ++i) {
    if (!(c[i] > c[i - 1])) {
      throw ConfigError(std::string(axis) + " coordinates: non-monotone at index " +
                        std::to_string(i));
    }
  }
}

}  // namespace

MicroMesh::MicroMesh(std::vector<double> x_coords, std::vector<double> y_coords)
    : x_(std::move(x_coords)), y_(std::move(y_coords)) {
  check_monotone(x_, "x");
  check_monotone(y_, "y");
}

MicroMesh MicroMesh::uniform(int nx, int ny, double width, double height) {
  std::vector<double> x(nx + 1), y(ny + 1);
  for (int j = 0; j <= nx; ++j) x[j] = width * j / nx;
  for (int k = 0; k <= ny; ++k) y[k] = height * k / ny;
  return MicroMesh(std::move(x), std::move(y));
}

MicroMesh build_micro_mesh(int nx, int ny, std::vector<double> x_coords,
                           std::vector<double> y_coords) {
  if (nx < 2 || ny < 2) throw ConfigError("micro mesh needs nx >= 2 and ny >= 2");
  if (static_cast<int>(x_coords.size()) != nx + 1 || static_cast<int>(y_coords.size()) != ny + 1) {
    throw ConfigError("coordinate list lengths must be nx+1 and ny+1");
  }
  return MicroMesh(std::move(x_coords), std::move(y_coords));
}

ElementData ElementData::from_mesh(const MicroMesh& mesh, CellField kappa) {
  if (kappa.nx() != mesh.nx() || kappa.ny() != mesh.ny()) {
    throw ConfigError("kappa field shape does not match the mesh");
  }
  ElementData d;
  d.hx.resize(mesh.nx());
  d.hy.resize(mesh.ny());
  for (int j = 1; j <= mesh.nx(); ++j) d.hx[j - 1] = mesh.hx(j);
  for (int k = 1; k <= mesh.ny(); ++k) d.hy[k - 1] = mesh.hy(k);
  d.kappa = std::move(kappa);
  return d;
}

// ---------------------------------------------------------------------------

DofLayout::DofLayout(int nx, int ny) : nx_(nx), ny_(ny) {
  if (nx < 2 || ny < 2) throw ConfigError("DOF layout needs nx >= 2 and ny >= 2");
}

std::optional<int> DofLayout::index(DofKind kind, int j, int k) const {
  if (kind == DofKind::alpha) {
    if (j < 0 || j > nx_ || k < 1 || k > ny_) {
      throw ConfigError("alpha DOF (" + std::to_string(j) + "," + std::to_string(k) +
                        ") out of range");
    }
    if (j == 0 || j == nx_) return std::nullopt;
    return (k - 1) * (nx_ - 1) + (j - 1);
  }
  if (j < 1 || j > nx_ || k < 0 || k > ny_) {
    throw ConfigError("beta DOF (" + std::to_string(j) + "," + std::to_string(k) +
                      ") out of range");
  }
  if (k == 0 || k == ny_) return std::nullopt;
  return num_alpha() + (k - 1) * nx_ + (j - 1);
}

DofLabel DofLayout::label(int index) const {
  if (index < 0 || index >= size()) {
    throw ConfigError("DOF index " + std::to_string(index) + " out of range");
  }
  if (index < num_alpha()) {
    return {DofKind::alpha, index % (nx_ - 1) + 1, index / (nx_ - 1) + 1};
  }
  const int r = index - num_alpha();
  return {DofKind::beta, r % nx_ + 1, r / nx_ + 1};
}

std::array<std::optional<int>, 4> DofLayout::element_dofs(int j, int k) const {
  return {index(DofKind::alpha, j - 1, k), index(DofKind::alpha, j, k),
          index(DofKind::beta, j, k - 1), index(DofKind::beta, j, k)};
}

// ---------------------------------------------------------------------------

CellBlock CellBlock::grown(int layers, int nx, int ny) const {
  return {std::max(0, x0 - layers), std::min(nx, x1 + layers), std::max(0, y0 - layers),
          std::min(ny, y1 + layers)};
}

Patch::Patch(CellBlock block)
    : block_(block),
      num_alpha_((block.nx() + 1) * block.ny()),
      num_beta_(block.nx() * (block.ny() + 1)) {
  if (block.nx() < 1 || block.ny() < 1) throw ConfigError("empty cell block");
  flags_.resize(size());
  for (int i = 0; i < size(); ++i) {
    const DofLabel l = label(i);
    const bool on_boundary = l.kind == DofKind::alpha ? (l.j == block.x0 || l.j == block.x1)
                                                      : (l.k == block.y0 || l.k == block.y1);
    flags_[i] = on_boundary ? 1 : 0;
    (on_boundary ? boundary_ : interior_).push_back(i);
  }
}

int Patch::index(DofKind kind, int j, int k) const {
  const auto& b = block_;
  if (kind == DofKind::alpha) {
    if (j < b.x0 || j > b.x1 || k <= b.y0 || k > b.y1) return -1;
    return (k - b.y0 - 1) * (b.nx() + 1) + (j - b.x0);
  }
  if (j <= b.x0 || j > b.x1 || k < b.y0 || k > b.y1) return -1;
  return num_alpha_ + (k - b.y0) * b.nx() + (j - b.x0 - 1);
}

DofLabel Patch::label(int local) const {
  const auto& b = block_;
  if (local < num_alpha_) {
    return {DofKind::alpha, b.x0 + local % (b.nx() + 1), b.y0 + 1 + local / (b.nx() + 1)};
  }
  const int r = local - num_alpha_;
  return {DofKind::beta, b.x0 + 1 + r % b.nx(), b.y0 + r / b.nx()};
}

std::array<int, 4> Patch::element_dofs(int j, int k) const {
  return {index(DofKind::alpha, j - 1, k), index(DofKind::alpha, j, k),
          index(DofKind::beta, j, k - 1), index(DofKind::beta, j, k)};
}

// ---------------------------------------------------------------------------

std::vector<DofLabel> MacroEdge::micro_dofs() const {
  std::vector<DofLabel> out;
  out.reserve(to - from);
  for (int i = from + 1; i <= to; ++i) {
    if (orientation == EdgeOrientation::vertical) {
      out.push_back({DofKind::alpha, line, i});
    } else {
      out.push_back({DofKind::beta, i, line});
    }
  }
  return out;
}

namespace {

void check_breaks(const std::vector<int>& b, int n, const char* axis) {
  if (b.size() < 2 || b.front() != 0 || b.back() != n) {
    throw ConfigError(std::string("macro breakpoints in ") + axis + " must run from 0 to " +
                      std::to_string(n));
  }
  for (std::size_t i = 1; i < b.size(); ++i) {
    if (b[i] <= b[i - 1]) {
      throw ConfigError(std::string("macro breakpoints in ") + axis +
                        ": non-monotone at index " + std::to_string(i));
    }
  }
}

}  // namespace

MacroMesh::MacroMesh(int nx, int ny, std::vector<int> breaks_x, std::vector<int> breaks_y)
    : nx_(nx), ny_(ny), bx_(std::move(breaks_x)), by_(std::move(breaks_y)) {
  check_breaks(bx_, nx, "x");
  check_breaks(by_, ny, "y");
  const int ncol = num_cols();
  const int nrow = num_rows();

  // Vertical edges on lines bx_[0..ncol], rows 1..nrow; then horizontal edges.
  auto vertical_id = [&](int c, int r) { return (r - 1) * (ncol + 1) + c; };
  const int num_vertical = (ncol + 1) * nrow;
  auto horizontal_id = [&](int c, int r) { return num_vertical + r * ncol + (c - 1); };

  for (int r = 1; r <= nrow; ++r) {
    for (int c = 0; c <= ncol; ++c) {
      MacroEdge e;
      e.id = vertical_id(c, r);
      e.orientation = EdgeOrientation::vertical;
      e.line = bx_[c];
      e.from = by_[r - 1];
      e.to = by_[r];
      e.neighbors = {c >= 1 ? element_at(c, r) : -1, c < ncol ? element_at(c + 1, r) : -1};
      edges_.push_back(e);
    }
  }
  for (int r = 0; r <= nrow; ++r) {
    for (int c = 1; c <= ncol; ++c) {
      MacroEdge e;
      e.id = horizontal_id(c, r);
      e.orientation = EdgeOrientation::horizontal;
      e.line = by_[r];
      e.from = bx_[c - 1];
      e.to = bx_[c];
      e.neighbors = {r >= 1 ? element_at(c, r) : -1, r < nrow ? element_at(c, r + 1) : -1};
      edges_.push_back(e);
    }
  }
  for (const auto& e : edges_) {
    if (e.interior()) interior_edges_.push_back(e.id);
  }
  for (int r = 1; r <= nrow; ++r) {
    for (int c = 1; c <= ncol; ++c) {
      MacroElement t;
      t.id = element_at(c, r);
      t.col = c;
      t.row = r;
      t.cells = {bx_[c - 1], bx_[c], by_[r - 1], by_[r]};
      t.edges = {vertical_id(c - 1, r), vertical_id(c, r), horizontal_id(c, r - 1),
                 horizontal_id(c, r)};
      elements_.push_back(t);
    }
  }
  col_of_cell_.resize(nx);
  row_of_cell_.resize(ny);
  for (int c = 1; c <= ncol; ++c) {
    for (int j = bx_[c - 1] + 1; j <= bx_[c]; ++j) col_of_cell_[j - 1] = c;
  }
  for (int r = 1; r <= nrow; ++r) {
    for (int k = by_[r - 1] + 1; k <= by_[r]; ++k) row_of_cell_[k - 1] = r;
  }
}

int MacroMesh::element_containing(int j, int k) const {
  return element_at(col_of_cell_[j - 1], row_of_cell_[k - 1]);
}

MacroMesh build_macro_mesh(int nx, int ny, int block_x, int block_y) {
  if (block_x < 1 || block_y < 1 || nx % block_x != 0 || ny % block_y != 0) {
    throw ConfigError("block sizes " + std::to_string(block_x) + "x" + std::to_string(block_y) +
                      " do not divide the " + std::to_string(nx) + "x" + std::to_string(ny) +
                      " micro mesh");
  }
  std::vector<int> bx, by;
  for (int i = 0; i <= nx; i += block_x) bx.push_back(i);
  for (int i = 0; i <= ny; i += block_y) by.push_back(i);
  return MacroMesh(nx, ny, std::move(bx), std::move(by));
}

MacroMesh build_macro_mesh(const MicroMesh& mesh, int block_x, int block_y) {
  return build_macro_mesh(mesh.nx(), mesh.ny(), block_x, block_y);
}

}  // namespace amsfem
