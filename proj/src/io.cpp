#include "amsfem/io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

namespace amsfem::io {

namespace {

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(path.string() + ": cannot open for reading");
  return in;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

bool blank_or_comment(const std::string& line) {
  const auto p = line.find_first_not_of(" \t\r");
  return p == std::string::npos || line[p] == '%';
}

// Reads the banner and returns its lower-cased tokens; `line_no` is advanced
// past the size line, whose values are returned in `sizes`.
std::vector<std::string> read_header(std::istream& in, const fs::path& path, int& line_no,
                                     std::vector<long long>& sizes, std::size_t expected) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path.string(), 1, "empty file");
  line_no = 1;
  std::istringstream banner(lower(line));
  std::vector<std::string> tokens;
  for (std::string t; banner >> t;) tokens.push_back(t);
  if (tokens.size() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix") {
    throw ParseError(path.string(), 1, "missing %%MatrixMarket matrix banner");
  }
  if (tokens[3] != "real") throw ParseError(path.string(), 1, "only real fields are supported");
  while (std::getline(in, line)) {
    ++line_no;
    if (blank_or_comment(line)) continue;
    std::istringstream ss(line);
    sizes.clear();
    for (long long v; ss >> v;) sizes.push_back(v);
    std::string rest;
    if (sizes.size() != expected || (ss.clear(), ss >> rest)) {
      throw ParseError(path.string(), line_no, "malformed size line");
    }
    for (long long v : sizes) {
      if (v < 0) throw ParseError(path.string(), line_no, "negative size");
    }
    return tokens;
  }
  throw ParseError(path.string(), line_no + 1, "missing size line");
}

std::string fmt17(double v) { return fmt::format("{:.17g}", v); }

}  // namespace

void write_text(const fs::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  if (ec) throw Error(path.string() + ": cannot create directory: " + ec.message());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(path.string() + ": cannot open for writing");
  out << text;
  if (!out) throw Error(path.string() + ": write failed");
}

void write_matrix_market(const fs::path& path, const SparseMatrix& A) {
  if (A.rows() != A.cols()) throw ConfigError("only square matrices can be stored as symmetric");
  std::vector<std::tuple<Eigen::Index, Eigen::Index, double>> lower_entries;
  for (int c = 0; c < A.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(A, c); it; ++it) {
      if (it.row() >= it.col()) lower_entries.emplace_back(it.row(), it.col(), it.value());
    }
  }
  std::sort(lower_entries.begin(), lower_entries.end(), [](const auto& a, const auto& b) {
    return std::tie(std::get<1>(a), std::get<0>(a)) < std::tie(std::get<1>(b), std::get<0>(b));
  });
  std::string text = "%%MatrixMarket matrix coordinate real symmetric\n";
  text += fmt::format("{} {} {}\n", A.rows(), A.cols(), lower_entries.size());
  for (const auto& [r, c, v] : lower_entries) text += fmt::format("{} {} {}\n", r + 1, c + 1, fmt17(v));
  write_text(path, text);
}

SparseMatrix read_matrix_market(const fs::path& path) {
  auto in = open_in(path);
  int line_no = 0;
  std::vector<long long> sizes;
  const auto tokens = read_header(in, path, line_no, sizes, 3);
  if (tokens[2] != "coordinate") throw ParseError(path.string(), 1, "expected coordinate format");
  const bool symmetric = tokens[4] == "symmetric";
  if (!symmetric && tokens[4] != "general") {
    throw ParseError(path.string(), 1, "unsupported symmetry '" + tokens[4] + "'");
  }
  const long long rows = sizes[0], cols = sizes[1], nnz = sizes[2];
  std::vector<Triplet> trips;
  trips.reserve(static_cast<std::size_t>(symmetric ? 2 * nnz : nnz));
  long long seen = 0;
  std::string line;
  while (seen < nnz && std::getline(in, line)) {
    ++line_no;
    if (blank_or_comment(line)) continue;
    std::istringstream ss(line);
    long long r = 0, c = 0;
    double v = 0.0;
    std::string rest;
    if (!(ss >> r >> c >> v) || (ss >> rest)) {
      throw ParseError(path.string(), line_no, "malformed entry");
    }
    if (r < 1 || r > rows || c < 1 || c > cols) {
      throw ParseError(path.string(), line_no, "index out of range");
    }
    if (symmetric && c > r) throw ParseError(path.string(), line_no, "entry above the diagonal");
    trips.emplace_back(r - 1, c - 1, v);
    if (symmetric && r != c) trips.emplace_back(c - 1, r - 1, v);
    ++seen;
  }
  if (seen < nnz) {
    throw ParseError(path.string(), line_no + 1,
                     "truncated: expected " + std::to_string(nnz) + " entries, found " +
                         std::to_string(seen));
  }
  SparseMatrix A(rows, cols);
  A.setFromTriplets(trips.begin(), trips.end());
  return A;
}

void write_vector(const fs::path& path, const Vector& v) {
  std::string text = "%%MatrixMarket matrix array real general\n";
  text += fmt::format("{} 1\n", v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) text += fmt17(v[i]) + "\n";
  write_text(path, text);
}

Vector read_vector(const fs::path& path) {
  auto in = open_in(path);
  int line_no = 0;
  std::vector<long long> sizes;
  const auto tokens = read_header(in, path, line_no, sizes, 2);
  if (tokens[2] != "array" || tokens[4] != "general") {
    throw ParseError(path.string(), 1, "expected array real general");
  }
  if (sizes[1] != 1) throw ParseError(path.string(), line_no, "expected a single column");
  Vector v(sizes[0]);
  long long seen = 0;
  std::string line;
  while (seen < sizes[0] && std::getline(in, line)) {
    ++line_no;
    if (blank_or_comment(line)) continue;
    std::istringstream ss(line);
    std::string rest;
    if (!(ss >> v[seen]) || (ss >> rest)) throw ParseError(path.string(), line_no, "malformed value");
    ++seen;
  }
  if (seen < sizes[0]) {
    throw ParseError(path.string(), line_no + 1,
                     "truncated: expected " + std::to_string(sizes[0]) + " values, found " +
                         std::to_string(seen));
  }
  return v;
}

namespace {

nlohmann::json parse_json(const fs::path& path) {
  auto in = open_in(path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    // byte offset is the only position nlohmann reports; map it to a line
    std::ifstream again(path);
    int line = 1;
    std::size_t pos = 0;
    for (char ch; pos + 1 < e.byte && again.get(ch); ++pos) line += ch == '\n';
    throw ParseError(path.string(), line, e.what());
  }
}

template <class T>
T field(const nlohmann::json& j, const char* key, const fs::path& path) {
  if (!j.contains(key)) throw ParseError(path.string(), 1, std::string("missing key '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string(), 1, std::string("bad value for '") + key + "': " + e.what());
  }
}

}  // namespace

void write_mesh_json(const fs::path& path, const MeshSidecar& mesh) {
  nlohmann::ordered_json j;
  j["nx"] = mesh.nx;
  j["ny"] = mesh.ny;
  j["block_x"] = mesh.block_x;
  j["block_y"] = mesh.block_y;
  j["dof_order"] = mesh.dof_order;
  write_text(path, j.dump(2) + "\n");
}

MeshSidecar read_mesh_json(const fs::path& path) {
  const auto j = parse_json(path);
  MeshSidecar m;
  m.nx = field<int>(j, "nx", path);
  m.ny = field<int>(j, "ny", path);
  m.block_x = field<int>(j, "block_x", path);
  m.block_y = field<int>(j, "block_y", path);
  m.dof_order = field<std::string>(j, "dof_order", path);
  if (m.dof_order != "alpha-then-beta-rowmajor") {
    throw ConfigError(path.string() + ": unsupported dof_order '" + m.dof_order + "'");
  }
  return m;
}

void write_mesh_truth(const fs::path& path, const MicroMesh& mesh) {
  nlohmann::ordered_json j;
  j["x_coords"] = mesh.x_coords();
  j["y_coords"] = mesh.y_coords();
  write_text(path, j.dump() + "\n");
}

MicroMesh read_mesh_truth(const fs::path& path) {
  const auto j = parse_json(path);
  return MicroMesh(field<std::vector<double>>(j, "x_coords", path),
                   field<std::vector<double>>(j, "y_coords", path));
}

void write_cell_csv(const fs::path& path, const CellField& f) {
  std::string text;
  for (int k = 1; k <= f.ny(); ++k) {
    for (int j = 1; j <= f.nx(); ++j) {
      text += fmt17(f(j, k));
      text += j == f.nx() ? '\n' : ',';
    }
  }
  write_text(path, text);
}

CellField read_cell_csv(const fs::path& path, int nx, int ny) {
  auto in = open_in(path);
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(nx) * ny);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ss(line);
    int count = 0;
    for (std::string cell; std::getline(ss, cell, ',');) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \r", used) != std::string::npos) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw ParseError(path.string(), line_no, "bad number '" + cell + "'");
      }
      ++count;
    }
    if (count != nx) {
      throw ParseError(path.string(), line_no,
                       "expected " + std::to_string(nx) + " values, found " + std::to_string(count));
    }
  }
  if (values.size() != static_cast<std::size_t>(nx) * ny) {
    throw ParseError(path.string(), line_no + 1, "expected " + std::to_string(ny) + " rows");
  }
  return CellField(nx, ny, std::move(values));
}

void write_column_csv(const fs::path& path, const std::vector<double>& values) {
  std::string text;
  for (double v : values) text += fmt17(v) + "\n";
  write_text(path, text);
}

void write_provenance_csv(const fs::path& path, const RecoveredField& field) {
  std::string text;
  for (int k = 1; k <= field.ny(); ++k) {
    for (int j = 1; j <= field.nx(); ++j) {
      text += to_string(field.provenance_at(j, k));
      text += j == field.nx() ? '\n' : ',';
    }
  }
  write_text(path, text);
}

}  // namespace amsfem::io
