#include "amsfem/moments.hpp"

#include "amsfem/dssy.hpp"
#include "amsfem/numerics.hpp"

#include <algorithm>
#include <string>

namespace amsfem {

namespace {
// Modes with mu_k < kRankTol * mu_1 are treated as absent.
constexpr double kRankTol = 1e-12;
}  // namespace

std::string_view to_string(MomentMethod m) {
  return m == MomentMethod::snapshot_trace ? "trace" : "harmonic";
}

Matrix MomentSpace::normalized_modes() const {
  Matrix q = modes;
  for (Eigen::Index c = 0; c < q.cols(); ++c) q.col(c) /= std::sqrt(mu[c]);
  return q;
}

double MomentSpace::inner(const Vector& u, const Vector& v) const {
  return (weights.array() * u.array() * v.array()).sum();
}

Vector edge_weights(const MacroEdge& edge, const ElementData& data) {
  Vector w(edge.num_micro_edges());
  for (int i = 0; i < edge.num_micro_edges(); ++i) {
    const int cell = edge.from + 1 + i;
    w[i] = edge.orientation == EdgeOrientation::vertical ? data.height(cell) : data.width(cell);
  }
  return w;
}

Matrix edge_traces(const Patch& patch, const Matrix& functions, const MacroEdge& edge) {
  const auto dofs = edge.micro_dofs();
  Matrix out(static_cast<Eigen::Index>(dofs.size()), functions.cols());
  for (std::size_t i = 0; i < dofs.size(); ++i) {
    const int local = patch.index(dofs[i]);
    if (local < 0) throw ConfigError("macro edge " + std::to_string(edge.id) + " not in patch");
    out.row(static_cast<Eigen::Index>(i)) = functions.row(local);
  }
  return out;
}

MomentSpace moment_space_from_traces(const MacroEdge& edge, const Vector& weights,
                                     const Matrix& traces, int L, MomentMethod method) {
  MomentSpace ms;
  ms.edge = edge.id;
  ms.method = method;
  ms.micro_dofs = edge.micro_dofs();
  ms.weights = weights;
  const auto svd = numerics::weighted_svd(traces, weights, kRankTol);
  ms.mu = svd.singular_values.array().square();
  const int keep = L <= 0 ? ms.rank() : std::min(L, ms.rank());
  ms.modes = svd.left.leftCols(keep);
  for (int c = 0; c < keep; ++c) ms.modes.col(c) *= svd.singular_values[c];
  return ms;
}

MomentSpace moment_space_traces(const MacroMesh& macro, int edge, const ElementData& data,
                                std::span<const SnapshotSpace* const> neighbor_snapshots,
                                int L) {
  const MacroEdge& e = macro.edge(edge);
  Eigen::Index cols = 0;
  for (const auto* s : neighbor_snapshots) cols += s->functions.cols();
  Matrix traces(e.num_micro_edges(), cols);
  Eigen::Index c = 0;
  for (const auto* s : neighbor_snapshots) {
    if (s->owner != e.neighbors[0] && s->owner != e.neighbors[1]) {
      throw ConfigError("snapshot space of element " + std::to_string(s->owner) +
                        " does not touch edge " + std::to_string(edge));
    }
    traces.middleCols(c, s->functions.cols()) = edge_traces(s->patch, s->functions, e);
    c += s->functions.cols();
  }
  return moment_space_from_traces(e, edge_weights(e, data), traces, L,
                                  MomentMethod::snapshot_trace);
}

MomentSpace moment_space_harmonic(const MacroMesh& macro, int edge, const ElementData& data,
                                  int layers, int L) {
  if (layers < 0) throw ConfigError("moment oversampling layers must be >= 0");
  const MacroEdge& e = macro.edge(edge);
  CellBlock omega{macro.micro_nx(), 0, macro.micro_ny(), 0};
  for (int t : e.neighbors) {
    if (t < 0) continue;
    const CellBlock& b = macro.element(t).cells;
    omega = {std::min(omega.x0, b.x0), std::max(omega.x1, b.x1), std::min(omega.y0, b.y0),
             std::max(omega.y1, b.y1)};
  }
  omega = omega.grown(layers, macro.micro_nx(), macro.micro_ny());
  Patch patch(omega);
  const Matrix ext = harmonic_extensions(patch, patch_stiffness(patch, data));
  return moment_space_from_traces(e, edge_weights(e, data), edge_traces(patch, ext, e), L,
                                  MomentMethod::harmonic_oversampled);
}

}  // namespace amsfem
