#pragma once

// Error norms of micro DSSY fields against an analytic solution, and the
// convergence study over (eps, 1/H) grids.

#include "amsfem/dssy.hpp"
#include "amsfem/mesh.hpp"
#include "amsfem/model_problem.hpp"
#include "amsfem/pipeline.hpp"
#include "amsfem/types.hpp"

#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace amsfem {

using GradientField = std::function<Eigen::Vector2d(double x, double y)>;

/// (sum_T int_T kappa |grad u_h - grad u|^2)^(1/2) / (sum_T int_T kappa |grad u|^2)^(1/2)
/// by 5x5 Gauss quadrature per micro element; 0 when both vanish.
double broken_energy_error(const MicroMesh& mesh, const DofLayout& layout, const CellField& kappa,
                           const Vector& u_h, const GradientField& grad_exact);

/// ||u_h - u||_{L2} / ||u||_{L2}; 0 when both vanish.
double l2_error(const MicroMesh& mesh, const DofLayout& layout, const Vector& u_h,
                const ScalarField& exact);

/// sqrt((u - v)^T A (u - v) / v^T A v); 0 when both vanish.
double discrete_energy_difference(const SparseMatrix& A, const Vector& u, const Vector& v);

/// Midpoint values of a function at the interior DOFs (DSSY interpolant).
Vector midpoint_interpolant(const MicroMesh& mesh, const DofLayout& layout,
                            const ScalarField& u);

enum class SolveMode { gmsfem, ams };

std::string_view to_string(SolveMode m);
SolveMode parse_mode(std::string_view s);

struct ErrorReport {
  double eps = 0.0;
  int invH = 0;
  int invh = 0;
  int dim_coarse = 0;
  SolveMode mode = SolveMode::gmsfem;
  double rel_energy = 0.0;
  double rel_l2 = 0.0;
  double seconds = 0.0;
};

/// Micro mesh geometry of the unit square rebuilt from recovered sizes.
MicroMesh mesh_from_sizes(const std::vector<double>& hx, const std::vector<double>& hy);

struct StudyConfig {
  std::vector<double> eps;
  std::vector<int> invH;
  std::vector<SolveMode> modes;
  int ratio = 10;  // H / h
  MultiscaleOptions options;
};

/// One row per (eps, 1/H, mode) in that nesting order.
std::vector<ErrorReport> run_study(const StudyConfig& config);

/// Runs a single (eps, 1/H, 1/h) case for the requested modes.
std::vector<ErrorReport> run_case(double eps, int invH, int invh,
                                  const std::vector<SolveMode>& modes,
                                  const MultiscaleOptions& options);

inline constexpr std::string_view kStudyHeader =
    "eps,invH,invh,dim,mode,rel_energy,rel_l2,seconds";

void write_study_csv(std::ostream& out, const std::vector<ErrorReport>& rows);

}  // namespace amsfem
