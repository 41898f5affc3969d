#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <stdexcept>
#include <string>

namespace amsfem {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid input or configuration (bad mesh, bad flags, malformed files).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file; carries the 1-based line number of the failure.
class ParseError : public ConfigError {
 public:
  ParseError(const std::string& path, int line, const std::string& what)
      : ConfigError(path + ":" + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// Numerical breakdown: indefinite matrix, singular local solve, ...
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// The matrix does not have the structure of a DSSY system on the given layout.
class StructuralError : public Error {
 public:
  using Error::Error;
};

}  // namespace amsfem
