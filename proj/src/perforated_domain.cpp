#include "holelab/perforated_domain.hpp"

#include "holelab/errors.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace holelab {

double PerforatedDomain::hole_scale() const { return std::pow(epsilon(), alpha); }

HoleShape PerforatedDomain::cell_hole(int k) const {
  HoleShape h = hole;
  h.size *= hole_scale();
  h.rotation += rotations.at(k);
  return h;
}

double PerforatedDomain::hole_area(int k, int n_hole) const { return cell_hole(k).polygonal_area(n_hole); }

void PerforatedDomain::validate() const {
  if (n < 1) throw InvalidSpec("perforated domain needs at least one cell per axis");
  if (!(alpha >= 1.0)) throw InvalidSpec("alpha must be >= 1");
  if (!(delta > 0.0 && delta < 0.5)) throw InvalidSpec("delta must lie in (0, 1/2)");
  if (!(b1 > 0.0)) throw InvalidSpec("b1 must be positive");
  hole.validate();
  if (static_cast<int>(rotations.size()) != num_cells() || static_cast<int>(centers.size()) != num_cells())
    throw InvalidSpec("perforated domain: per-cell data has the wrong length");
  const double eps = epsilon();
  for (int k = 0; k < num_cells(); ++k) {
    const int i = k % n;
    const int j = k / n;
    const Point& c = centers[k];
    std::ostringstream os;
    os << "cell k = " << k << " (" << i << ", " << j << "): ";
    // ball inside the delta-inset cell
    const double lo_x = (i + delta) * eps, hi_x = (i + 1 - delta) * eps;
    const double lo_y = (j + delta) * eps, hi_y = (j + 1 - delta) * eps;
    const double r = ball_radius();
    if (c.x() - r < lo_x - 1e-14 || c.x() + r > hi_x + 1e-14 || c.y() - r < lo_y - 1e-14 || c.y() + r > hi_y + 1e-14) {
      os << "ball B(x_k, b1*eps) of radius " << r << " is not inside the inset cell (b1 <= 1/2 - delta required, b1 = "
         << b1 << ", delta = " << delta << ")";
      throw InvalidSpec(os.str());
    }
    const double hr = hole_scale() * hole.max_radius();
    if (!(hr < r)) {
      os << "hole of radius " << hr << " is not strictly inside the ball of radius " << r;
      throw InvalidSpec(os.str());
    }
  }
}

PerforatedDomain build_perforated(int n, double alpha, const HoleShape& hole, double b1, std::uint64_t rotation_seed,
                                  double delta) {
  PerforatedDomain pd;
  pd.n = n;
  pd.alpha = alpha;
  pd.hole = hole;
  pd.b1 = b1;
  pd.delta = delta;
  if (n < 1) throw InvalidSpec("perforated domain needs at least one cell per axis");
  const double eps = 1.0 / n;
  pd.centers.resize(static_cast<std::size_t>(n) * n);
  pd.rotations.assign(pd.centers.size(), 0.0);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) pd.centers[j * n + i] = Point((i + 0.5) * eps, (j + 0.5) * eps);
  if (rotation_seed != 0) {
    std::mt19937_64 rng(rotation_seed);
    for (auto& r : pd.rotations) r = 2.0 * pi * static_cast<double>(rng() >> 11) * 0x1.0p-53;
  }
  pd.validate();
  return pd;
}

}  // namespace holelab
