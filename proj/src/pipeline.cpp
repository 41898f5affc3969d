#include "amsfem/pipeline.hpp"

#include <algorithm>
#include <string>

namespace amsfem {

MultiscaleResult solve_multiscale(const SparseSystem& system, const DofLayout& layout,
                                  const MacroMesh& macro, const ElementData& data,
                                  const MultiscaleOptions& options) {
  if (layout.nx() != macro.micro_nx() || layout.ny() != macro.micro_ny() ||
      data.nx() != layout.nx() || data.ny() != layout.ny()) {
    throw ConfigError("layout, macro mesh and element data disagree on the micro mesh size");
  }
  if (options.extra_modes < 0) throw ConfigError("extra offline modes must be >= 0");

  MultiscaleResult r;
  const auto& elements = macro.elements();
  r.snapshots.reserve(elements.size());
  for (const auto& t : elements) {
    r.snapshots.push_back(oversampled_snapshot_space(macro, t.id, data, options.layers));
  }

  r.moments.reserve(macro.edges().size());
  for (const auto& e : macro.edges()) {
    if (options.moment == MomentMethod::snapshot_trace) {
      std::vector<const SnapshotSpace*> around;
      for (int t : e.neighbors) {
        if (t >= 0) around.push_back(&r.snapshots[t]);
      }
      r.moments.push_back(moment_space_traces(macro, e.id, data, around, options.LE));
    } else {
      r.moments.push_back(
          moment_space_harmonic(macro, e.id, data, options.moment_layers, options.LE));
    }
  }

  r.offline.reserve(elements.size());
  for (const auto& t : elements) {
    int L = options.extra_modes;
    for (int e : t.edges) L += r.moments[e].dimension();
    const auto& snap = r.snapshots[t.id];
    L = std::clamp(L, 1, static_cast<int>(snap.functions.cols()));
    r.offline.push_back(offline_space(snap, local_operators(t.cells, data), L));
  }

  r.basis = build_coarse_basis(macro, r.offline, r.moments);
  r.coarse = assemble_coarse(r.basis.restriction(macro, layout), system);
  prune_dependent_rows(macro, r.basis, r.coarse);
  r.solution = solve_coarse(r.coarse, options.direct_limit);
  return r;
}

}  // namespace amsfem
