#pragma once

// File exchange: Matrix Market systems and vectors, JSON mesh sidecars and
// CSV field dumps. Every reader reports the path and line of a failure.

#include "amsfem/mesh.hpp"
#include "amsfem/recovery.hpp"
#include "amsfem/types.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace amsfem::io {

namespace fs = std::filesystem;

/// Coordinate real symmetric (lower triangle), 17 significant digits.
void write_matrix_market(const fs::path& path, const SparseMatrix& A);
/// Accepts coordinate real general or symmetric; symmetric input is expanded.
SparseMatrix read_matrix_market(const fs::path& path);

/// Array real general, one column.
void write_vector(const fs::path& path, const Vector& v);
Vector read_vector(const fs::path& path);

/// Layout description shared between the generator and every consumer.
struct MeshSidecar {
  int nx = 0;
  int ny = 0;
  int block_x = 0;
  int block_y = 0;
  std::string dof_order = "alpha-then-beta-rowmajor";
};

void write_mesh_json(const fs::path& path, const MeshSidecar& mesh);
MeshSidecar read_mesh_json(const fs::path& path);

/// Ground-truth coordinates, kept apart from the layout sidecar.
void write_mesh_truth(const fs::path& path, const MicroMesh& mesh);
MicroMesh read_mesh_truth(const fs::path& path);

/// ny lines of nx comma-separated values, row k = 1 first.
void write_cell_csv(const fs::path& path, const CellField& field);
CellField read_cell_csv(const fs::path& path, int nx, int ny);

/// One value per line.
void write_column_csv(const fs::path& path, const std::vector<double>& values);

void write_provenance_csv(const fs::path& path, const RecoveredField& field);

/// Writes text, creating parent directories; throws Error with the path on failure.
void write_text(const fs::path& path, const std::string& text);

}  // namespace amsfem::io
