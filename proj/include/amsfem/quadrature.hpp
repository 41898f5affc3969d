#pragma once

#include <vector>

namespace amsfem {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> points;
  std::vector<double> weights;
};

/// n-point rule, exact for polynomials of degree 2n-1.
const GaussRule& gauss_legendre(int n);

}  // namespace amsfem
