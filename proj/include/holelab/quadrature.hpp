#pragma once

#include <array>
#include <vector>

namespace holelab {

/// Triangle quadrature in barycentric coordinates; weights sum to 1, so the
/// integral over a triangle is area * sum(w_i f(x_i)).
struct QuadRule {
  int degree = 0;
  std::vector<std::array<double, 3>> bary;
  std::vector<double> weights;
  int size() const { return static_cast<int>(weights.size()); }
};

/// Collapsed (Duffy) Gauss-Legendre product rule exact for polynomials of
/// total degree `degree` (0 <= degree <= 30). Rules are built once and shared.
const QuadRule& triangle_rule(int degree);

/// n-point Gauss-Legendre nodes and weights on [0, 1].
void gauss_legendre01(int n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace holelab
