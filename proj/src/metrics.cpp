#include "amsfem/metrics.hpp"

#include "amsfem/quadrature.hpp"
#include "amsfem/recovery.hpp"

#include <chrono>
#include <cmath>
#include <ostream>
#include <string>

#include <fmt/format.h>

namespace amsfem {

namespace {

constexpr int kQuadOrder = 5;

std::array<double, 4> element_values(const DofLayout& layout, const Vector& u, int j, int k) {
  const auto dofs = layout.element_dofs(j, k);
  std::array<double, 4> v{};
  for (int a = 0; a < 4; ++a) v[a] = dofs[a] ? u[*dofs[a]] : 0.0;
  return v;
}

void check_field(const DofLayout& layout, const Vector& u) {
  if (u.size() != layout.size()) {
    throw ConfigError("field has " + std::to_string(u.size()) + " entries, layout has " +
                      std::to_string(layout.size()));
  }
}

double relative(double num, double den) {
  if (den == 0.0) return num == 0.0 ? 0.0 : std::sqrt(num);
  return std::sqrt(num / den);
}

}  // namespace

double broken_energy_error(const MicroMesh& mesh, const DofLayout& layout, const CellField& kappa,
                           const Vector& u_h, const GradientField& grad_exact) {
  check_field(layout, u_h);
  const GaussRule& g = gauss_legendre(kQuadOrder);
  double num = 0.0, den = 0.0;
  for (int k = 1; k <= mesh.ny(); ++k) {
    for (int j = 1; j <= mesh.nx(); ++j) {
      const double hx = mesh.hx(j), hy = mesh.hy(k);
      const auto c = mesh.center(j, k);
      const auto v = element_values(layout, u_h, j, k);
      double en = 0.0, ed = 0.0;
      for (std::size_t p = 0; p < g.points.size(); ++p) {
        for (std::size_t q = 0; q < g.points.size(); ++q) {
          const double x = 0.5 * hx * g.points[p], y = 0.5 * hy * g.points[q];
          const double w = 0.25 * hx * hy * g.weights[p] * g.weights[q];
          Eigen::Vector2d grad = Eigen::Vector2d::Zero();
          for (int a = 0; a < 4; ++a) grad += v[a] * dssy::eval_basis(a, x, y, hx, hy).gradient;
          const Eigen::Vector2d ge = grad_exact(c[0] + x, c[1] + y);
          en += w * (grad - ge).squaredNorm();
          ed += w * ge.squaredNorm();
        }
      }
      num += kappa(j, k) * en;
      den += kappa(j, k) * ed;
    }
  }
  return relative(num, den);
}

double l2_error(const MicroMesh& mesh, const DofLayout& layout, const Vector& u_h,
                const ScalarField& exact) {
  check_field(layout, u_h);
  const GaussRule& g = gauss_legendre(kQuadOrder);
  double num = 0.0, den = 0.0;
  for (int k = 1; k <= mesh.ny(); ++k) {
    for (int j = 1; j <= mesh.nx(); ++j) {
      const double hx = mesh.hx(j), hy = mesh.hy(k);
      const auto c = mesh.center(j, k);
      const auto v = element_values(layout, u_h, j, k);
      for (std::size_t p = 0; p < g.points.size(); ++p) {
        for (std::size_t q = 0; q < g.points.size(); ++q) {
          const double x = 0.5 * hx * g.points[p], y = 0.5 * hy * g.points[q];
          const double w = 0.25 * hx * hy * g.weights[p] * g.weights[q];
          double val = 0.0;
          for (int a = 0; a < 4; ++a) val += v[a] * dssy::eval_basis(a, x, y, hx, hy).value;
          const double ue = exact(c[0] + x, c[1] + y);
          num += w * (val - ue) * (val - ue);
          den += w * ue * ue;
        }
      }
    }
  }
  return relative(num, den);
}

double discrete_energy_difference(const SparseMatrix& A, const Vector& u, const Vector& v) {
  const Vector d = u - v;
  return relative(d.dot(A * d), v.dot(A * v));
}

Vector midpoint_interpolant(const MicroMesh& mesh, const DofLayout& layout,
                            const ScalarField& u) {
  Vector out(layout.size());
  for (int i = 0; i < layout.size(); ++i) {
    const DofLabel l = layout.label(i);
    out[i] = l.kind == DofKind::alpha
                 ? u(mesh.x(l.j), 0.5 * (mesh.y(l.k - 1) + mesh.y(l.k)))
                 : u(0.5 * (mesh.x(l.j - 1) + mesh.x(l.j)), mesh.y(l.k));
  }
  return out;
}

std::string_view to_string(SolveMode m) { return m == SolveMode::ams ? "ams" : "gmsfem"; }

SolveMode parse_mode(std::string_view s) {
  if (s == "ams") return SolveMode::ams;
  if (s == "gmsfem") return SolveMode::gmsfem;
  throw ConfigError("unknown mode '" + std::string(s) + "' (expected ams or gmsfem)");
}

MicroMesh mesh_from_sizes(const std::vector<double>& hx, const std::vector<double>& hy) {
  auto cumulative = [](const std::vector<double>& h) {
    std::vector<double> c(h.size() + 1, 0.0);
    for (std::size_t i = 0; i < h.size(); ++i) c[i + 1] = c[i] + h[i];
    return c;
  };
  return MicroMesh(cumulative(hx), cumulative(hy));
}

std::vector<ErrorReport> run_case(double eps, int invH, int invh,
                                  const std::vector<SolveMode>& modes,
                                  const MultiscaleOptions& options) {
  if (invH < 1 || invh < 1 || invh % invH != 0) {
    throw ConfigError("1/h = " + std::to_string(invh) + " must be a multiple of 1/H = " +
                      std::to_string(invH));
  }
  const ModelProblem problem(eps);
  const MicroMesh mesh = MicroMesh::uniform(invh, invh);
  const DofLayout layout(invh, invh);
  const MacroMesh macro = build_macro_mesh(mesh, invh / invH, invh / invH);
  const CellField kappa = problem.sampled_kappa(mesh);
  const SparseSystem system = assemble_micro_system(
      mesh, layout, kappa, [&](double x, double y) { return problem.f(x, y); });

  std::vector<ErrorReport> rows;
  for (SolveMode mode : modes) {
    const auto start = std::chrono::steady_clock::now();
    ElementData data;
    MicroMesh geometry = mesh;
    if (mode == SolveMode::ams) {
      const RecoveredField rec = recover_field(system.A, layout);
      data = rec.element_data();
      geometry = mesh_from_sizes(data.hx, data.hy);
    } else {
      data = ElementData::from_mesh(mesh, kappa);
    }
    const MultiscaleResult ms = solve_multiscale(system, layout, macro, data, options);
    ErrorReport rep;
    rep.eps = eps;
    rep.invH = invH;
    rep.invh = invh;
    rep.mode = mode;
    rep.dim_coarse = ms.dimension();
    const Vector& uH = ms.solution.prolonged;
    rep.rel_energy = broken_energy_error(geometry, layout, data.kappa, uH,
                                         [&](double x, double y) { return problem.grad_u(x, y); });
    rep.rel_l2 =
        l2_error(geometry, layout, uH, [&](double x, double y) { return problem.u(x, y); });
    rep.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    rows.push_back(rep);
  }
  return rows;
}

std::vector<ErrorReport> run_study(const StudyConfig& config) {
  if (config.ratio < 1) throw ConfigError("H/h ratio must be >= 1");
  std::vector<ErrorReport> rows;
  for (double eps : config.eps) {
    for (int invH : config.invH) {
      auto r = run_case(eps, invH, invH * config.ratio, config.modes, config.options);
      rows.insert(rows.end(), r.begin(), r.end());
    }
  }
  return rows;
}

void write_study_csv(std::ostream& out, const std::vector<ErrorReport>& rows) {
  out << kStudyHeader << '\n';
  for (const auto& r : rows) {
    out << fmt::format("{},{},{},{},{},{:.6e},{:.6e},{:.3f}\n", r.eps, r.invH, r.invh,
                       r.dim_coarse, to_string(r.mode), r.rel_energy, r.rel_l2, r.seconds);
  }
}

}  // namespace amsfem
