#include "amsfem/dssy.hpp"
#include "amsfem/io.hpp"
#include "amsfem/recovery.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "support.hpp"

using namespace amsfem;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

SparseMatrix random_system_matrix(unsigned seed) {
  std::mt19937 rng(seed);
  const MicroMesh mesh = amsfem::testing::random_mesh(7, 6, rng);
  return assemble_stiffness(mesh, DofLayout(mesh), amsfem::testing::random_kappa(7, 6, rng));
}

int parse_line(const fs::path& p, auto&& reader) {
  try {
    reader(p);
  } catch (const ParseError& e) {
    return e.line();
  }
  return -1;
}

}  // namespace

TEST(MatrixMarket, RoundTripIsBitwise) {
  const auto dir = amsfem::testing::scratch_dir("io_mm");
  const SparseMatrix A = random_system_matrix(1);
  io::write_matrix_market(dir / "A.mtx", A);
  const SparseMatrix B = io::read_matrix_market(dir / "A.mtx");
  ASSERT_EQ(B.rows(), A.rows());
  EXPECT_EQ(Matrix(A), Matrix(B));
  io::write_matrix_market(dir / "B.mtx", B);
  EXPECT_EQ(slurp(dir / "A.mtx"), slurp(dir / "B.mtx"));
  const std::string text = slurp(dir / "A.mtx");
  EXPECT_EQ(text.rfind("%%MatrixMarket matrix coordinate real symmetric", 0), 0u);
}

TEST(MatrixMarket, ReadsGeneralFormat) {
  const auto dir = amsfem::testing::scratch_dir("io_general");
  spit(dir / "g.mtx",
       "%%MatrixMarket matrix coordinate real general\n% comment\n2 2 3\n1 1 2.5\n1 2 -1\n2 2 4\n");
  const SparseMatrix A = io::read_matrix_market(dir / "g.mtx");
  EXPECT_EQ(A.coeff(0, 1), -1.0);
  EXPECT_EQ(A.coeff(1, 0), 0.0);
  EXPECT_EQ(A.coeff(1, 1), 4.0);
}

TEST(MatrixMarket, ParseErrorsCarryLineNumbers) {
  const auto dir = amsfem::testing::scratch_dir("io_errors");
  const auto read = [](const fs::path& p) { io::read_matrix_market(p); };
  const std::string head = "%%MatrixMarket matrix coordinate real symmetric\n3 3 4\n";
  spit(dir / "trunc.mtx", head + "1 1 2\n2 1 -1\n");
  EXPECT_EQ(parse_line(dir / "trunc.mtx", read), 5);
  try {
    io::read_matrix_market(dir / "trunc.mtx");
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("expected 4 entries, found 2"), std::string::npos)
        << e.what();
    EXPECT_NE(std::string(e.what()).find("trunc.mtx:5"), std::string::npos) << e.what();
  }
  spit(dir / "range.mtx", head + "1 1 2\n4 1 1\n");
  EXPECT_EQ(parse_line(dir / "range.mtx", read), 4);
  spit(dir / "upper.mtx", head + "1 2 2\n");
  EXPECT_EQ(parse_line(dir / "upper.mtx", read), 3);
  spit(dir / "junk.mtx", head + "1 1 x\n");
  EXPECT_EQ(parse_line(dir / "junk.mtx", read), 3);
  spit(dir / "banner.mtx", "hello\n");
  EXPECT_EQ(parse_line(dir / "banner.mtx", read), 1);
  spit(dir / "empty.mtx", "");
  EXPECT_EQ(parse_line(dir / "empty.mtx", read), 1);
  EXPECT_THROW(io::read_matrix_market(dir / "missing.mtx"), Error);
  try {
    io::read_matrix_market(dir / "missing.mtx");
  } catch (const ConfigError&) {
    FAIL() << "an unreadable file is an I/O error, not a configuration error";
  } catch (const Error&) {
  }
}

TEST(Vectors, RoundTripAndErrors) {
  const auto dir = amsfem::testing::scratch_dir("io_vec");
  Vector v(5);
  v << 1.0 / 3, -2e-300, 0.0, 7.25, 1e300;
  io::write_vector(dir / "v.vec", v);
  EXPECT_EQ(io::read_vector(dir / "v.vec"), v);
  spit(dir / "short.vec", "%%MatrixMarket matrix array real general\n3 1\n1\n2\n");
  const auto read = [](const fs::path& p) { io::read_vector(p); };
  EXPECT_EQ(parse_line(dir / "short.vec", read), 5);
  spit(dir / "wide.vec", "%%MatrixMarket matrix array real general\n3 2\n");
  EXPECT_EQ(parse_line(dir / "wide.vec", read), 2);
}

TEST(Sidecars, MeshJsonRoundTrip) {
  const auto dir = amsfem::testing::scratch_dir("io_json");
  io::write_mesh_json(dir / "mesh.json", {50, 40, 10, 8});
  const io::MeshSidecar m = io::read_mesh_json(dir / "mesh.json");
  EXPECT_EQ(m.nx, 50);
  EXPECT_EQ(m.ny, 40);
  EXPECT_EQ(m.block_x, 10);
  EXPECT_EQ(m.block_y, 8);
  EXPECT_EQ(m.dof_order, "alpha-then-beta-rowmajor");
  const std::string text = slurp(dir / "mesh.json");
  EXPECT_EQ(text.find("kappa"), std::string::npos);
  EXPECT_EQ(text.find("coords"), std::string::npos);
}

TEST(Sidecars, MeshJsonErrors) {
  const auto dir = amsfem::testing::scratch_dir("io_json_err");
  spit(dir / "a.json", R"({"nx": 4, "ny": 4, "block_x": 2})");
  EXPECT_THROW(io::read_mesh_json(dir / "a.json"), ParseError);
  spit(dir / "b.json", R"({"nx": 4, "ny": 4, "block_x": 2, "block_y": 2, "dof_order": "beta-first"})");
  EXPECT_THROW(io::read_mesh_json(dir / "b.json"), ConfigError);
  spit(dir / "c.json", "{\n\"nx\": 4,\n oops\n}");
  EXPECT_EQ(parse_line(dir / "c.json", [](const fs::path& p) { io::read_mesh_json(p); }), 3);
}

TEST(Sidecars, TruthAndCellFields) {
  const auto dir = amsfem::testing::scratch_dir("io_truth");
  std::mt19937 rng(3);
  const MicroMesh mesh = amsfem::testing::random_mesh(4, 3, rng);
  io::write_mesh_truth(dir / "truth.json", mesh);
  const MicroMesh back = io::read_mesh_truth(dir / "truth.json");
  EXPECT_EQ(back.x_coords(), mesh.x_coords());
  EXPECT_EQ(back.y_coords(), mesh.y_coords());

  const CellField k = amsfem::testing::random_kappa(4, 3, rng);
  io::write_cell_csv(dir / "k.csv", k);
  EXPECT_EQ(io::read_cell_csv(dir / "k.csv", 4, 3).values(), k.values());
  EXPECT_THROW(io::read_cell_csv(dir / "k.csv", 3, 3), ParseError);
  EXPECT_THROW(io::read_cell_csv(dir / "k.csv", 4, 4), ParseError);
  std::string first_line = slurp(dir / "k.csv");
  first_line = first_line.substr(0, first_line.find('\n'));
  EXPECT_EQ(std::count(first_line.begin(), first_line.end(), ','), 3);
}

TEST(Sidecars, RecoveryOutputs) {
  const auto dir = amsfem::testing::scratch_dir("io_rec");
  const SparseMatrix A = random_system_matrix(4);
  const RecoveredField r = recover_field(A, DofLayout(7, 6));
  io::write_provenance_csv(dir / "prov.csv", r);
  io::write_column_csv(dir / "hx.csv", r.hx);
  const std::string prov = slurp(dir / "prov.csv");
  EXPECT_NE(prov.find("corner-ratio"), std::string::npos);
  EXPECT_NE(prov.find("interior-pair"), std::string::npos);
  EXPECT_EQ(std::count(prov.begin(), prov.end(), '\n'), 6);
  const std::string hx = slurp(dir / "hx.csv");
  EXPECT_EQ(std::count(hx.begin(), hx.end(), '\n'), 7);
}

TEST(Files, WriteTextCreatesDirectoriesAndReportsFailures) {
  const auto dir = amsfem::testing::scratch_dir("io_text");
  io::write_text(dir / "a" / "b" / "c.txt", "hi\n");
  EXPECT_EQ(slurp(dir / "a" / "b" / "c.txt"), "hi\n");
  spit(dir / "blocker", "x");
  try {
    io::write_text(dir / "blocker" / "x.txt", "y");
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("blocker"), std::string::npos);
  }
}
