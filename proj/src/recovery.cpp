#include "amsfem/recovery.hpp"

#include <cmath>
#include <optional>
#include <string>

namespace amsfem {

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::interior_pair:
      return "interior-pair";
    case Provenance::boundary_pair:
      return "boundary-pair";
    case Provenance::corner_ratio:
      return "corner-ratio";
  }
  return "unknown";
}

namespace {

constexpr double kRadicandClamp = 1e-9;

// 28/37 * c/(c+n) - 1: gamma^2 for a beta pair, gamma^-2 for an alpha pair.
double pair_radicand(double cross, double neighbor) {
  const double sum = cross + neighbor;
  if (!(cross < 0.0)) throw NumericalError("inconsistent entries: cross entry must be negative");
  if (std::abs(sum) <= 1e-14 * (std::abs(cross) + std::abs(neighbor))) {
    throw NumericalError("degenerate pair: cross + neighbor vanishes");
  }
  if (!(sum < 0.0)) throw NumericalError("inconsistent entries: cross + neighbor must be negative");
  double r = (28.0 / 37.0) * cross / sum - 1.0;
  if (r < -kRadicandClamp) {
    throw NumericalError("inconsistent entries: negative radicand " + std::to_string(r) +
                         " (matrix not DSSY-generated)");
  }
  if (r < 0.0) r = 0.0;
  if (r == 0.0) throw NumericalError("degenerate pair: vanishing aspect ratio");
  return r;
}

std::optional<double> stored(const SparseMatrix& A, int row, int col) {
  for (SparseMatrix::InnerIterator it(A, col); it; ++it) {
    if (it.row() == row) return it.value() != 0.0 ? std::optional<double>(it.value()) : std::nullopt;
    if (it.row() > row) break;
  }
  return std::nullopt;
}

}  // namespace

ElementRecovery recover_element(double cross, double neighbor, PairKind kind) {
  const double root = std::sqrt(pair_radicand(cross, neighbor));
  const double sum = cross + neighbor;
  // Both kinds give kappa = -(c+n) * root; only the meaning of root differs.
  if (kind == PairKind::beta_pair) return {root, -sum * root};
  return {1.0 / root, -sum * root};
}

RecoveredField recover_field(const SparseMatrix& A, const DofLayout& layout) {
  const int nx = layout.nx();
  const int ny = layout.ny();
  if (A.rows() != layout.size() || A.cols() != layout.size()) {
    throw StructuralError("matrix is " + std::to_string(A.rows()) + "x" +
                          std::to_string(A.cols()) + " but the layout has " +
                          std::to_string(layout.size()) + " DOFs");
  }
  if (nx < 3 || ny < 3) {
    throw StructuralError("corner recovery needs at least 3x3 elements");
  }
  SparseMatrix Ac = A;
  Ac.makeCompressed();

  auto entry = [&](DofKind ka, int ja, int kka, DofKind kb, int jb, int kkb, int j, int k) {
    const int r = *layout.index(ka, ja, kka);
    const int c = *layout.index(kb, jb, kkb);
    auto v = stored(Ac, r, c);
    if (!v) v = stored(Ac, c, r);
    if (!v) {
      throw StructuralError("missing stiffness entry (" + std::to_string(r) + "," +
                            std::to_string(c) + ") needed for element (" + std::to_string(j) +
                            "," + std::to_string(k) + ")");
    }
    return *v;
  };

  RecoveredField out;
  out.kappa = CellField(nx, ny);
  out.gamma = CellField(nx, ny);
  out.provenance.assign(static_cast<std::size_t>(nx) * ny, Provenance::interior_pair);
  auto is_corner = [&](int j, int k) { return (j == 1 || j == nx) && (k == 1 || k == ny); };

  for (int k = 1; k <= ny; ++k) {
    for (int j = 1; j <= nx; ++j) {
      if (is_corner(j, k)) continue;
      ElementRecovery r{};
      Provenance prov{};
      if (k >= 2 && k <= ny - 1) {
        const int ja = j < nx ? j : j - 1;
        const double n = entry(DofKind::beta, j, k - 1, DofKind::beta, j, k, j, k);
        const double c = entry(DofKind::alpha, ja, k, DofKind::beta, j, k, j, k);
        r = recover_element(c, n, PairKind::beta_pair);
        prov = Provenance::interior_pair;
      } else {
        const int kb = k < ny ? k : k - 1;
        const double n = entry(DofKind::alpha, j - 1, k, DofKind::alpha, j, k, j, k);
        const double c = entry(DofKind::alpha, j, k, DofKind::beta, j, kb, j, k);
        r = recover_element(c, n, PairKind::alpha_pair);
        prov = Provenance::boundary_pair;
      }
      out.gamma(j, k) = r.gamma;
      out.kappa(j, k) = r.kappa;
      out.provenance[static_cast<std::size_t>(k - 1) * nx + (j - 1)] = prov;
    }
  }

  for (int j : {1, nx}) {
    for (int k : {1, ny}) {
      const int jn = j == 1 ? 2 : nx - 1;
      const int kn = k == 1 ? 2 : ny - 1;
      const double g = out.gamma(j, kn) * out.gamma(jn, k) / out.gamma(jn, kn);
      const int ja = j == 1 ? j : j - 1;
      const int kb = k == 1 ? k : k - 1;
      const double c = entry(DofKind::alpha, ja, k, DofKind::beta, j, kb, j, k);
      if (!(c < 0.0)) throw NumericalError("inconsistent entries: cross entry must be negative");
      out.gamma(j, k) = g;
      out.kappa(j, k) = -c * 28.0 / (37.0 * (g + 1.0 / g));
      out.provenance[static_cast<std::size_t>(k - 1) * nx + (j - 1)] = Provenance::corner_ratio;
    }
  }

  out.hx.assign(nx, 0.0);
  out.hy.assign(ny, 0.0);
  for (int j = 1; j <= nx; ++j) {
    double s = 0.0;
    for (int k = 1; k <= ny; ++k) s += out.gamma(j, k);
    out.hx[j - 1] = 1.0 / s;
  }
  for (int k = 1; k <= ny; ++k) {
    double s = 0.0;
    for (int j = 1; j <= nx; ++j) s += 1.0 / out.gamma(j, k);
    out.hy[k - 1] = 1.0 / s;
  }
  return out;
}

ElementData RecoveredField::element_data(double width, double height) const {
  ElementData d;
  d.hx = hx;
  d.hy = hy;
  for (double& h : d.hx) h *= height;
  for (double& h : d.hy) h *= width;
  d.kappa = kappa;
  return d;
}

}  // namespace amsfem
