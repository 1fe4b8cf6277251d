#include "holelab/quadrature.hpp"

#include "holelab/errors.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace holelab {

namespace {

/// P_n(x) and P_n'(x) by the three-term recurrence.
std::pair<double, double> legendre(int n, double x) {
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  const double pn = n == 0 ? 1.0 : p1;
  const double pnm1 = n <= 1 ? 1.0 : p0;
  return {pn, n * (x * pn - pnm1) / (x * x - 1.0)};
}

}  // namespace

void gauss_legendre01(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(3.14159265358979323846 * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [pn, dp] = legendre(n, x);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = legendre(n, x).second;
    nodes[n - 1 - i] = 0.5 * (x + 1.0);
    weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
}

namespace {

QuadRule build_rule(int degree) {
  const int m = (degree + 3) / 2;  // ceil((degree + 2) / 2)
  std::vector<double> x, wx;
  gauss_legendre01(m, x, wx);
  QuadRule r;
  r.degree = degree;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const double u = x[i];
      const double v = x[j] * (1.0 - u);
      // reference triangle area 1/2, weights normalized to sum 1
      r.weights.push_back(2.0 * wx[i] * wx[j] * (1.0 - u));
      r.bary.push_back({1.0 - u - v, u, v});
    }
  }
  return r;
}

struct RuleTable {
  std::array<QuadRule, 31> rules;
  RuleTable() {
    for (int d = 0; d <= 30; ++d) rules[d] = build_rule(d);
  }
};

}  // namespace

const QuadRule& triangle_rule(int degree) {
  static const RuleTable table;
  if (degree < 0 || degree > 30) throw DomainError("quadrature degree must lie in [0, 30], got " + std::to_string(degree));
  return table.rules[degree];
}

}  // namespace holelab
