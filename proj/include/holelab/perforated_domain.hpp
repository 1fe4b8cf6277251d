#pragma once

#include "holelab/geometry.hpp"

#include <cstdint>
#include <vector>

namespace holelab {

/// Periodically perforated unit square D = (0,1)^2 with n x n cells of side
/// eps = 1/n. Every cell carries a hole eps^alpha * O_k(T) + x_k centered at
/// the cell center x_k, surrounded by the ball B(x_k, b1*eps).
///
/// Cells are numbered row by row: k = j*n + i with cell (i, j) occupying
/// [i*eps, (i+1)*eps] x [j*eps, (j+1)*eps].
struct PerforatedDomain {
  int n = 4;
  double alpha = 1.0;
  HoleShape hole = HoleShape::disk(0.25);
  double b1 = 0.375;
  double delta = 0.125;
  std::vector<double> rotations;  ///< O_k as angles, one per cell
  std::vector<Point> centers;     ///< x_k

  double epsilon() const { return 1.0 / n; }
  /// eps^alpha
  double hole_scale() const;
  double ball_radius() const { return b1 * epsilon(); }
  int num_cells() const { return n * n; }

  /// The hole of cell k as a HoleShape at physical size, centered at 0.
  HoleShape cell_hole(int k) const;
  /// Area of T_{eps,k} as represented by an n_hole-segment boundary.
  double hole_area(int k, int n_hole) const;

  /// Throws InvalidSpec naming the first cell whose inclusion chain
  /// T_{eps,k} in B(x_k, b1 eps) in eps*C_k^delta fails.
  void validate() const;
};

/// Rotation angles are uniform on [0, 2 pi) from a 64-bit Mersenne twister;
/// seed 0 gives all-zero rotations.
PerforatedDomain build_perforated(int n, double alpha, const HoleShape& hole, double b1, std::uint64_t rotation_seed,
                                  double delta = 0.125);

}  // namespace holelab
