#include "amsfem/cli.hpp"

#include "amsfem/dssy.hpp"
#include "amsfem/io.hpp"
#include "amsfem/metrics.hpp"
#include "amsfem/model_problem.hpp"
#include "amsfem/numerics.hpp"
#include "amsfem/pipeline.hpp"
#include "amsfem/recovery.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include <optional>
#include <ostream>
#include <sstream>

namespace amsfem::cli {

namespace {

namespace fs = std::filesystem;

// File names inside a run directory.
constexpr const char* kMatrix = "A.mtx";
constexpr const char* kRhs = "b.mtx";
constexpr const char* kMesh = "mesh.json";
constexpr const char* kReference = "u_h.vec";
constexpr const char* kTruthMesh = "mesh_truth.json";
constexpr const char* kTruthKappa = "kappa_true.csv";

struct GenerateArgs {
  double eps = 0.1;
  int invH = 5;
  int invh = 0;
  std::string out_dir;
};

struct RecoverArgs {
  std::string in_dir;
  std::string out_dir;
};

struct SolveArgs {
  std::string mode = "ams";
  std::optional<double> eps;
  std::string moment = "trace";
  int layers = 0;
  int moment_layers = 1;
  int LE = 0;
  int extra_modes = 0;
  std::string in_dir;
  std::string out_dir;
  std::string kappa_path;
  std::string truth_path;
};

struct StudyArgs {
  std::string eps = "0.1,0.2,0.5";
  std::string invH = "5,10,20,40";
  std::string modes = "gmsfem,ams";
  int ratio = 10;
  std::string moment = "trace";
  int layers = 0;
  int moment_layers = 1;
  int LE = 0;
  std::string out_dir;
};

template <class T>
std::vector<T> parse_list(const std::string& text, const char* name) {
  std::vector<T> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    if (item.find_first_not_of(" ") == std::string::npos) continue;
    std::istringstream is(item);
    T v{};
    std::string rest;
    if (!(is >> v) || (is >> rest)) {
      throw ConfigError(std::string("--") + name + ": bad list item '" + item + "'");
    }
    out.push_back(v);
  }
  return out;
}

MomentMethod parse_moment(const std::string& s) {
  if (s == "trace") return MomentMethod::snapshot_trace;
  if (s == "harmonic") return MomentMethod::harmonic_oversampled;
  throw ConfigError("unknown moment method '" + s + "' (expected trace or harmonic)");
}

int cmd_generate(const GenerateArgs& a, std::ostream& out) {
  const int invh = a.invh > 0 ? a.invh : 10 * a.invH;
  if (a.invH < 1 || invh % a.invH != 0) {
    throw ConfigError("1/h = " + std::to_string(invh) + " must be a multiple of 1/H = " +
                      std::to_string(a.invH));
  }
  const ModelProblem problem(a.eps);
  const MicroMesh mesh = MicroMesh::uniform(invh, invh);
  const DofLayout layout(invh, invh);
  build_macro_mesh(mesh, invh / a.invH, invh / a.invH);
  const CellField kappa = problem.sampled_kappa(mesh);
  const SparseSystem sys = assemble_micro_system(
      mesh, layout, kappa, [&](double x, double y) { return problem.f(x, y); });
  const Vector uh = numerics::SparseSpdSolver(sys.A).solve(sys.b);

  const fs::path dir(a.out_dir);
  io::write_matrix_market(dir / kMatrix, sys.A);
  io::write_vector(dir / kRhs, sys.b);
  io::write_mesh_json(dir / kMesh, {invh, invh, invh / a.invH, invh / a.invH, "alpha-then-beta-rowmajor"});
  io::write_vector(dir / kReference, uh);
  io::write_mesh_truth(dir / kTruthMesh, mesh);
  io::write_cell_csv(dir / kTruthKappa, kappa);
  const double bn = sys.b.norm();
  out << fmt::format("generated {} DOFs ({}x{} micro, {}x{} macro), reference residual {:.3e}\n",
                     layout.size(), invh, invh, a.invH, a.invH,
                     bn == 0.0 ? 0.0 : (sys.A * uh - sys.b).norm() / bn);
  return kExitOk;
}

int cmd_recover(const RecoverArgs& a, std::ostream& out) {
  const fs::path in(a.in_dir), dir(a.out_dir);
  const io::MeshSidecar side = io::read_mesh_json(in / kMesh);
  const DofLayout layout(side.nx, side.ny);
  const SparseMatrix A = io::read_matrix_market(in / kMatrix);
  if (A.rows() != layout.size() || A.cols() != layout.size()) {
    throw StructuralError(fmt::format("matrix is {}x{} but the layout has {} DOFs", A.rows(),
                                      A.cols(), layout.size()));
  }
  const RecoveredField rec = recover_field(A, layout);
  io::write_cell_csv(dir / "kappa.csv", rec.kappa);
  io::write_cell_csv(dir / "gamma.csv", rec.gamma);
  io::write_column_csv(dir / "hx.csv", rec.hx);
  io::write_column_csv(dir / "hy.csv", rec.hy);
  io::write_provenance_csv(dir / "provenance.csv", rec);
  out << fmt::format("recovered {}x{} elements\n", rec.nx(), rec.ny());
  return kExitOk;
}

int cmd_solve(const SolveArgs& a, std::ostream& out) {
  const SolveMode mode = parse_mode(a.mode);
  if (mode == SolveMode::ams && (!a.kappa_path.empty() || !a.truth_path.empty())) {
    throw ConfigError("ams mode takes only the linear system; --kappa/--truth are not allowed");
  }
  MultiscaleOptions opt;
  opt.moment = parse_moment(a.moment);
  opt.layers = a.layers;
  opt.moment_layers = a.moment_layers;
  opt.LE = a.LE;
  opt.extra_modes = a.extra_modes;

  const fs::path in(a.in_dir), dir(a.out_dir);
  const io::MeshSidecar side = io::read_mesh_json(in / kMesh);
  const DofLayout layout(side.nx, side.ny);
  const MacroMesh macro = build_macro_mesh(side.nx, side.ny, side.block_x, side.block_y);
  SparseSystem sys{io::read_matrix_market(in / kMatrix), io::read_vector(in / kRhs)};
  if (sys.A.rows() != layout.size() || sys.A.cols() != layout.size() ||
      sys.b.size() != layout.size()) {
    throw StructuralError(fmt::format("system is {}x{} with {} right-hand side entries but the "
                                      "layout has {} DOFs",
                                      sys.A.rows(), sys.A.cols(), sys.b.size(), layout.size()));
  }

  ElementData data;
  std::optional<MicroMesh> geometry;
  if (mode == SolveMode::ams) {
    data = recover_field(sys.A, layout).element_data();
    geometry = mesh_from_sizes(data.hx, data.hy);
  } else {
    const fs::path truth = a.truth_path.empty() ? in / kTruthMesh : fs::path(a.truth_path);
    const fs::path kpath = a.kappa_path.empty() ? in / kTruthKappa : fs::path(a.kappa_path);
    geometry = io::read_mesh_truth(truth);
    if (geometry->nx() != side.nx || geometry->ny() != side.ny) {
      throw ConfigError(truth.string() + ": mesh size does not match " + kMesh);
    }
    data = ElementData::from_mesh(*geometry, io::read_cell_csv(kpath, side.nx, side.ny));
  }

  const MultiscaleResult ms = solve_multiscale(sys, layout, macro, data, opt);
  io::write_vector(dir / "u_coarse.vec", ms.solution.coefficients);
  io::write_vector(dir / "u_H.vec", ms.solution.prolonged);

  nlohmann::ordered_json rep;
  rep["mode"] = std::string(to_string(mode));
  rep["invh"] = side.nx;
  rep["invH"] = macro.num_cols();
  rep["dim"] = ms.dimension();
  rep["dropped_rows"] = ms.basis.dropped;
  rep["coarse_residual"] = ms.solution.relative_residual;
  rep["moment"] = a.moment;
  rep["LE"] = a.LE;
  rep["layers"] = a.layers;
  if (a.eps) {
    const ModelProblem problem(*a.eps);
    rep["eps"] = *a.eps;
    rep["rel_energy"] = broken_energy_error(*geometry, layout, data.kappa, ms.solution.prolonged,
                                            [&](double x, double y) { return problem.grad_u(x, y); });
    rep["rel_l2"] = l2_error(*geometry, layout, ms.solution.prolonged,
                             [&](double x, double y) { return problem.u(x, y); });
  }
  if (fs::exists(in / kReference)) {
    const Vector uh = io::read_vector(in / kReference);
    if (uh.size() == layout.size()) {
      rep["rel_energy_vs_reference"] =
          discrete_energy_difference(sys.A, ms.solution.prolonged, uh);
    }
  }
  io::write_text(dir / "report.json", rep.dump(2) + "\n");
  out << rep.dump() << "\n";
  return kExitOk;
}

int cmd_study(const StudyArgs& a, std::ostream& out) {
  StudyConfig cfg;
  cfg.eps = parse_list<double>(a.eps, "eps");
  cfg.invH = parse_list<int>(a.invH, "invH");
  for (const auto& m : parse_list<std::string>(a.modes, "mode")) cfg.modes.push_back(parse_mode(m));
  cfg.ratio = a.ratio;
  cfg.options.moment = parse_moment(a.moment);
  cfg.options.layers = a.layers;
  cfg.options.moment_layers = a.moment_layers;
  cfg.options.LE = a.LE;
  const auto rows = run_study(cfg);
  std::ostringstream csv;
  write_study_csv(csv, rows);
  io::write_text(fs::path(a.out_dir) / "study.csv", csv.str());
  out << csv.str();
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Algebraic multiscale solver for DSSY systems"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "assemble the benchmark system and its reference solution");
  g->add_option("--eps", gen.eps, "oscillation amplitude")->capture_default_str();
  g->add_option("--invH", gen.invH, "macro elements per direction")->capture_default_str();
  g->add_option("--invh", gen.invh, "micro elements per direction (default 10/H)");
  g->add_option("--out-dir", gen.out_dir, "output directory")->required();

  RecoverArgs rec;
  auto* r = app.add_subcommand("recover", "recover kappa and mesh sizes from A.mtx");
  r->add_option("--in-dir", rec.in_dir, "directory with A.mtx and mesh.json")->required();
  r->add_option("--out-dir", rec.out_dir, "output directory")->required();

  SolveArgs sol;
  auto* s = app.add_subcommand("solve", "multiscale solve of A.mtx, b.mtx");
  s->add_option("--mode", sol.mode, "ams or gmsfem")->capture_default_str();
  s->add_option("--eps", sol.eps, "eps of the exact solution used for error reports");
  s->add_option("--moment", sol.moment, "trace or harmonic")->capture_default_str();
  s->add_option("--layers", sol.layers, "snapshot oversampling layers")->capture_default_str();
  s->add_option("--moment-layers", sol.moment_layers, "harmonic moment oversampling layers")
      ->capture_default_str();
  s->add_option("--LE", sol.LE, "moment modes per macro edge (0 = all)")->capture_default_str();
  s->add_option("--extra-modes", sol.extra_modes, "offline modes beyond the moment count")
      ->capture_default_str();
  s->add_option("--kappa", sol.kappa_path, "ground-truth kappa CSV (gmsfem only)");
  s->add_option("--truth", sol.truth_path, "ground-truth mesh JSON (gmsfem only)");
  s->add_option("--in-dir", sol.in_dir, "directory with A.mtx, b.mtx, mesh.json")->required();
  s->add_option("--out-dir", sol.out_dir, "output directory")->required();

  StudyArgs st;
  auto* y = app.add_subcommand("study", "convergence study over eps and 1/H");
  y->add_option("--eps", st.eps, "comma-separated eps values")->capture_default_str();
  y->add_option("--invH", st.invH, "comma-separated 1/H values")->capture_default_str();
  y->add_option("--mode", st.modes, "comma-separated modes")->capture_default_str();
  y->add_option("--ratio", st.ratio, "H/h")->capture_default_str();
  y->add_option("--moment", st.moment, "trace or harmonic")->capture_default_str();
  y->add_option("--layers", st.layers, "snapshot oversampling layers")->capture_default_str();
  y->add_option("--moment-layers", st.moment_layers, "harmonic moment oversampling layers")
      ->capture_default_str();
  y->add_option("--LE", st.LE, "moment modes per macro edge (0 = all)")->capture_default_str();
  y->add_option("--out-dir", st.out_dir, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (g->parsed()) return cmd_generate(gen, out);
    if (r->parsed()) return cmd_recover(rec, out);
    if (s->parsed()) return cmd_solve(sol, out);
    return cmd_study(st, out);
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const StructuralError& e) {
    err << "structural error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  }
}

}  // namespace amsfem::cli
