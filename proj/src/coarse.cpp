#include "amsfem/coarse.hpp"

#include "amsfem/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <string>
#include <utility>

namespace amsfem {

std::string_view to_string(BasisOrigin o) { return o == BasisOrigin::edge ? "edge" : "bubble"; }

int CoarseBasis::size() const {
  int n = 0;
  for (const auto& g : groups) n += g.count();
  return n;
}

Matrix moment_constraints(const MacroMesh& macro, int element, int edge,
                          const OfflineSpace& offline, const MomentSpace& moment) {
  const Patch patch(macro.element(element).cells);
  const Matrix traces = edge_traces(patch, offline.modes, macro.edge(edge));
  return (moment.weights.asDiagonal() * moment.normalized_modes()).transpose() * traces;
}

namespace {

Matrix stack_rows(const std::vector<Matrix>& blocks, Eigen::Index cols) {
  Eigen::Index rows = 0;
  for (const auto& b : blocks) rows += b.rows();
  Matrix out(rows, cols);
  Eigen::Index r = 0;
  for (const auto& b : blocks) {
    out.middleRows(r, b.rows()) = b;
    r += b.rows();
  }
  return out;
}

}  // namespace

BasisGroup glue_edge_space(const MacroMesh& macro, int edge,
                           const std::vector<OfflineSpace>& offline,
                           const std::vector<MomentSpace>& moments) {
  const MacroEdge& e = macro.edge(edge);
  if (!e.interior()) throw ConfigError("edge " + std::to_string(edge) + " is not interior");
  const int t1 = e.neighbors[0];
  const int t2 = e.neighbors[1];
  const Matrix& o1 = offline[t1].modes;
  const Matrix& o2 = offline[t2].modes;
  const Eigen::Index l1 = o1.cols();
  const Eigen::Index l2 = o2.cols();

  std::vector<Matrix> blocks;
  Matrix jump(moments[edge].dimension(), l1 + l2);
  jump.leftCols(l1) = moment_constraints(macro, t1, edge, offline[t1], moments[edge]);
  jump.rightCols(l2) = -moment_constraints(macro, t2, edge, offline[t2], moments[edge]);
  blocks.push_back(std::move(jump));
  for (int side = 0; side < 2; ++side) {
    const int t = e.neighbors[side];
    for (int other : macro.element(t).edges) {
      if (other == edge) continue;
      Matrix rows = Matrix::Zero(moments[other].dimension(), l1 + l2);
      const Matrix c = moment_constraints(macro, t, other, offline[t], moments[other]);
      if (side == 0) {
        rows.leftCols(l1) = c;
      } else {
        rows.rightCols(l2) = c;
      }
      blocks.push_back(std::move(rows));
    }
  }
  const Matrix C = stack_rows(blocks, l1 + l2);
  const Matrix N = numerics::svd_nullspace(C, kNullspaceTol);
  if (N.cols() < moments[edge].dimension()) {
    throw ConfigError("edge " + std::to_string(edge) + " is over-constrained: nullspace " +
                      std::to_string(N.cols()) + " < L(E) = " +
                      std::to_string(moments[edge].dimension()) + " (deficit " +
                      std::to_string(moments[edge].dimension() - N.cols()) + ")");
  }
  BasisGroup g;
  g.origin = BasisOrigin::edge;
  g.owner = edge;
  g.support = {t1, t2};
  g.local = {o1 * N.topRows(l1), o2 * N.bottomRows(l2)};
  return g;
}

BasisGroup bubble_space(const MacroMesh& macro, int element,
                        const std::vector<OfflineSpace>& offline,
                        const std::vector<MomentSpace>& moments) {
  const Matrix& o = offline[element].modes;
  std::vector<Matrix> blocks;
  for (int e : macro.element(element).edges) {
    blocks.push_back(moment_constraints(macro, element, e, offline[element], moments[e]));
  }
  const Matrix C = stack_rows(blocks, o.cols());
  const Matrix N = numerics::svd_nullspace(C, kNullspaceTol);
  BasisGroup g;
  g.origin = BasisOrigin::bubble;
  g.owner = element;
  g.support = {element};
  g.local = {o * N};
  return g;
}

double constraint_residual(const MacroMesh& macro, const BasisGroup& group,
                           const std::vector<MomentSpace>& moments) {
  double worst = 0.0;
  const int n = group.count();
  auto side_trace = [&](int element, const MacroEdge& e) -> Matrix {
    const auto it = std::find(group.support.begin(), group.support.end(), element);
    if (element < 0 || it == group.support.end()) {
      return Matrix::Zero(e.num_micro_edges(), n);
    }
    const auto s = static_cast<std::size_t>(it - group.support.begin());
    return edge_traces(Patch(macro.element(element).cells), group.local[s], e);
  };
  for (int t : group.support) {
    for (int id : macro.element(t).edges) {
      const MacroEdge& e = macro.edge(id);
      const Matrix jump = side_trace(e.neighbors[0], e) - side_trace(e.neighbors[1], e);
      const MomentSpace& m = moments[id];
      if (m.dimension() == 0) continue;
      const Matrix r = (m.weights.asDiagonal() * m.normalized_modes()).transpose() * jump;
      if (r.size()) worst = std::max(worst, r.cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

namespace {

using SparseRow = std::vector<std::pair<int, double>>;  // sorted global indices

// Maps group columns to rows over the global interior DOFs. A DOF on an
// interior macro edge belongs to two elements and takes the average.
class RowMapper {
 public:
  explicit RowMapper(const MacroMesh& macro)
      : layout_(macro.micro_nx(), macro.micro_ny()), weight_(layout_.size(), 1.0) {
    std::vector<char> on_x(layout_.nx() + 1, 0), on_y(layout_.ny() + 1, 0);
    for (int b : macro.breaks_x()) on_x[b] = 1;
    for (int b : macro.breaks_y()) on_y[b] = 1;
    for (int i = 0; i < layout_.size(); ++i) {
      const DofLabel l = layout_.label(i);
      if (l.kind == DofKind::alpha ? on_x[l.j] : on_y[l.k]) weight_[i] = 0.5;
    }
    maps_.resize(macro.elements().size());
    for (const auto& t : macro.elements()) {
      const Patch patch(t.cells);
      for (int i = 0; i < patch.size(); ++i) {
        if (const auto gi = layout_.index(patch.label(i))) maps_[t.id].emplace_back(i, *gi);
      }
    }
  }

  int size() const { return layout_.size(); }

  SparseRow row(const BasisGroup& g, int c) const {
    SparseRow entries;
    for (std::size_t s = 0; s < g.support.size(); ++s) {
      for (const auto& [local, global] : maps_[g.support[s]]) {
        entries.emplace_back(global, g.local[s](local, c) * weight_[global]);
      }
    }
    std::sort(entries.begin(), entries.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
    SparseRow merged;
    for (std::size_t i = 0; i < entries.size();) {
      double v = entries[i].second;
      std::size_t j = i + 1;
      while (j < entries.size() && entries[j].first == entries[i].first) v += entries[j++].second;
      if (v != 0.0) merged.emplace_back(entries[i].first, v);
      i = j;
    }
    return merged;
  }

 private:
  DofLayout layout_;
  std::vector<double> weight_;
  std::vector<std::vector<std::pair<int, int>>> maps_;  // (patch index, global index)
};

}  // namespace

CoarseBasis build_coarse_basis(const MacroMesh& macro, const std::vector<OfflineSpace>& offline,
                               const std::vector<MomentSpace>& moments) {
  CoarseBasis basis;
  for (const auto& t : macro.elements()) {
    BasisGroup g = bubble_space(macro, t.id, offline, moments);
    if (g.count() > 0) basis.groups.push_back(std::move(g));
  }
  for (int e : macro.interior_edges()) {
    basis.groups.push_back(glue_edge_space(macro, e, offline, moments));
  }
  return basis;
}

SparseMatrix CoarseBasis::restriction(const MacroMesh& macro, const DofLayout& layout) const {
  if (layout.nx() != macro.micro_nx() || layout.ny() != macro.micro_ny()) {
    throw ConfigError("layout does not match the macro mesh");
  }
  const RowMapper mapper(macro);
  Eigen::SparseMatrix<double, Eigen::RowMajor> R(size(), layout.size());
  int row = 0;
  std::vector<SparseRow> rows;
  Eigen::VectorXi per_row(size());
  for (const auto& g : groups) {
    for (int c = 0; c < g.count(); ++c) {
      rows.push_back(mapper.row(g, c));
      per_row[row++] = static_cast<int>(rows.back().size());
    }
  }
  R.reserve(per_row);
  for (int r = 0; r < static_cast<int>(rows.size()); ++r) {
    for (const auto& [i, v] : rows[r]) R.insert(r, i) = v;
  }
  R.makeCompressed();
  return SparseMatrix(R);
}

CoarseSystem assemble_coarse(const SparseMatrix& R, const SparseSystem& system) {
  if (R.cols() != system.A.rows() || system.A.rows() != system.b.size()) {
    throw ConfigError("coarse basis has " + std::to_string(R.cols()) +
                      " columns but the system has " + std::to_string(system.A.rows()) + " rows");
  }
  CoarseSystem cs;
  cs.R = R;
  const SparseMatrix RA = R * system.A;
  SparseMatrix AM = RA * SparseMatrix(R.transpose());
  cs.A = 0.5 * (AM + SparseMatrix(AM.transpose()));
  cs.b = R * system.b;
  return cs;
}

int prune_dependent_rows(const MacroMesh& macro, CoarseBasis& basis, CoarseSystem& cs,
                         double rel_tol) {
  const int n = static_cast<int>(cs.A.rows());
  if (n != basis.size()) throw ConfigError("coarse system does not match the basis");
  std::vector<int> first(basis.groups.size() + 1, 0);
  for (std::size_t g = 0; g < basis.groups.size(); ++g) {
    first[g + 1] = first[g] + basis.groups[g].count();
  }
  std::vector<std::vector<int>> accepted(basis.groups.size());
  std::vector<std::vector<int>> groups_on(macro.elements().size());
  std::vector<int> pos(n, -1);
  std::vector<char> keep(n, 0);
  int dropped = 0;

  for (std::size_t gi = 0; gi < basis.groups.size(); ++gi) {
    const BasisGroup& g = basis.groups[gi];
    std::vector<int> earlier;
    for (int t : g.support) {
      const MacroElement& te = macro.element(t);
      for (const auto& u : macro.elements()) {
        if (std::abs(u.col - te.col) > 1 || std::abs(u.row - te.row) > 1) continue;
        earlier.insert(earlier.end(), groups_on[u.id].begin(), groups_on[u.id].end());
      }
    }
    std::sort(earlier.begin(), earlier.end());
    earlier.erase(std::unique(earlier.begin(), earlier.end()), earlier.end());

    std::vector<int> idx;
    for (int h : earlier) idx.insert(idx.end(), accepted[h].begin(), accepted[h].end());
    const auto num_earlier = static_cast<Eigen::Index>(idx.size());
    for (int r = first[gi]; r < first[gi + 1]; ++r) idx.push_back(r);
    const auto m = static_cast<Eigen::Index>(idx.size());
    for (Eigen::Index i = 0; i < m; ++i) pos[idx[i]] = static_cast<int>(i);
    Matrix G = Matrix::Zero(m, m);
    for (Eigen::Index j = 0; j < m; ++j) {
      for (SparseMatrix::InnerIterator it(cs.A, idx[j]); it; ++it) {
        if (pos[it.row()] >= 0) G(pos[it.row()], j) = it.value();
      }
    }
    for (int i : idx) pos[i] = -1;

    // incremental Cholesky in visiting order; rows with a negligible pivot
    // are already spanned in the energy inner product
    Matrix L = Matrix::Zero(m, m);
    std::vector<Eigen::Index> basis_cols;
    for (Eigen::Index c = 0; c < m; ++c) {
      const auto k = static_cast<Eigen::Index>(basis_cols.size());
      Vector y(k);
      for (Eigen::Index i = 0; i < k; ++i) {
        double v = G(basis_cols[i], c);
        for (Eigen::Index l = 0; l < i; ++l) v -= L(i, l) * y[l];
        y[i] = v / L(i, i);
      }
      const double pivot = G(c, c) - y.squaredNorm();
      const bool independent = G(c, c) > 0.0 && pivot > rel_tol * G(c, c);
      if (independent) {
        L.row(k).head(k) = y.transpose();
        L(k, k) = std::sqrt(pivot);
        basis_cols.push_back(c);
      }
      if (c >= num_earlier) {
        const int r = idx[c];
        if (independent) {
          keep[r] = 1;
          accepted[gi].push_back(r);
        } else {
          ++dropped;
        }
      }
    }
    for (int t : g.support) groups_on[t].push_back(static_cast<int>(gi));
  }
  if (dropped == 0) return 0;

  std::vector<int> kept_rows;
  for (std::size_t gi = 0; gi < basis.groups.size(); ++gi) {
    BasisGroup& g = basis.groups[gi];
    std::vector<int> cols;
    for (int r = first[gi]; r < first[gi + 1]; ++r) {
      if (keep[r]) {
        cols.push_back(r - first[gi]);
        kept_rows.push_back(r);
      }
    }
    if (static_cast<int>(cols.size()) < g.count()) {
      std::clog << "warning: dropping " << g.count() - static_cast<int>(cols.size())
                << " dependent " << to_string(g.origin) << " rows of owner " << g.owner << "\n";
    }
    for (auto& mat : g.local) {
      Matrix kept(mat.rows(), static_cast<Eigen::Index>(cols.size()));
      for (std::size_t i = 0; i < cols.size(); ++i) kept.col(i) = mat.col(cols[i]);
      mat = std::move(kept);
    }
  }
  basis.groups.erase(std::remove_if(basis.groups.begin(), basis.groups.end(),
                                    [](const BasisGroup& g) { return g.count() == 0; }),
                     basis.groups.end());
  SparseMatrix P(static_cast<Eigen::Index>(kept_rows.size()), n);
  std::vector<Triplet> trips;
  for (std::size_t i = 0; i < kept_rows.size(); ++i) trips.emplace_back(i, kept_rows[i], 1.0);
  P.setFromTriplets(trips.begin(), trips.end());
  cs.R = P * cs.R;
  cs.A = P * cs.A * SparseMatrix(P.transpose());
  cs.b = P * cs.b;
  basis.dropped += dropped;
  return dropped;
}

CoarseSolution solve_coarse(const CoarseSystem& cs, int direct_limit) {
  constexpr double kTargetResidual = 1e-12;
  constexpr int kMaxRefinements = 20;
  CoarseSolution sol;
  const Eigen::Index n = cs.A.rows();
  const double bnorm = cs.b.norm();
  if (bnorm == 0.0) {
    sol.coefficients = Vector::Zero(n);
  } else {
    // symmetric Jacobi scaling: basis rows differ in energy by many orders
    Vector d = cs.A.diagonal();
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!(d[i] > 0.0)) {
        throw NumericalError("coarse matrix has a non-positive diagonal entry at row " +
                             std::to_string(i) + " (broken gluing)");
      }
      d[i] = 1.0 / std::sqrt(d[i]);
    }
    const SparseMatrix As = d.asDiagonal() * cs.A * d.asDiagonal();
    const Vector bs = d.cwiseProduct(cs.b);
    Vector y;
    if (n <= direct_limit) {
      const numerics::SparseSpdSolver solver(As);
      y = solver.solve(bs);
      for (int step = 0; step < kMaxRefinements; ++step) {
        const Vector r = bs - As * y;
        if (r.norm() <= kTargetResidual * bs.norm()) break;
        y += solver.solve(r);
      }
    } else {
      y = numerics::conjugate_gradient(As, bs);
      sol.iterative = true;
    }
    sol.coefficients = d.cwiseProduct(y);
  }
  sol.relative_residual = bnorm == 0.0 ? 0.0 : (cs.A * sol.coefficients - cs.b).norm() / bnorm;
  sol.prolonged = cs.R.transpose() * sol.coefficients;
  return sol;
}

}  // namespace amsfem
