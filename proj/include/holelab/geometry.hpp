#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace holelab {

using Point = Eigen::Vector2d;
using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

inline constexpr double pi = 3.14159265358979323846;

enum class HoleKind { disk, square, polygon };

/// Model obstacle T, centered at the origin.
///
/// Boundary points are parameterized by t in [0,1) with t = 0 on the
/// positive x-axis (disk, square) so that rings of different shapes can be
/// stitched index by index. For the square, t is arclength and the corners
/// sit at t = 1/8 + j/4, so they are mesh vertices whenever the point count
/// is a multiple of 8.
struct HoleShape {
  HoleKind kind = HoleKind::disk;
  double size = 0.25;        ///< disk radius or square half-side
  double rotation = 0.0;     ///< radians
  std::vector<Point> polygon;  ///< polygon vertices, counter-clockwise

  static HoleShape disk(double radius);
  static HoleShape square(double half_side, double rotation = 0.0);
  static HoleShape make_polygon(std::vector<Point> vertices);

  /// Throws InvalidSpec if the shape is degenerate, not simple, or not
  /// positively oriented.
  void validate() const;

  /// sup |x| over the closed shape.
  double max_radius() const;
  double area() const;

  /// Normalized shape point (size 1, rotation applied) at parameter t for a
  /// ring of n points. The rotation of a square is quantized to 2*pi/n so
  /// corners stay on the point set; disks ignore rotation.
  Point unit_point(double t, int n) const;

  /// Perimeter of the normalized (size 1) shape.
  double unit_perimeter() const;

  /// The n boundary points of the shape at its physical size.
  std::vector<Point> boundary_points(int n) const;

  /// Area of the n-segment polygon that discretizes the boundary.
  double polygonal_area(int n) const;

  std::string describe() const;
};

enum class OuterKind { square, disk };

/// Omega (centered at 0) with the hole eps*T.
struct DomainSpec {
  OuterKind outer = OuterKind::square;
  double half_size = 2.0;  ///< square half-side or disk radius (L)
  HoleShape hole = HoleShape::disk(0.25);
  double epsilon = 0.5;
  int dimension = 2;

  /// Throws InvalidSpec unless B_1 is inside Omega and eps*closure(T) is
  /// inside B_{1/2}.
  void validate() const;

  double outer_area() const;
};

/// Unit square parameterization: half-side 1, t = 0 at (1, 0), corners at
/// t = 1/8 + j/4, arclength-uniform.
Point unit_square_point(double t);
Point unit_circle_point(double t);

/// Signed area of a closed polygon.
double signed_area(const std::vector<Point>& polygon);

}  // namespace holelab
