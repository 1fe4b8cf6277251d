#include "holelab/geometry.hpp"

#include "holelab/errors.hpp"

#include <cmath>
#include <sstream>

namespace holelab {

namespace {

bool segments_cross(const Point& a, const Point& b, const Point& c, const Point& d) {
  auto orient = [](const Point& p, const Point& q, const Point& r) {
    return (q.x() - p.x()) * (r.y() - p.y()) - (q.y() - p.y()) * (r.x() - p.x());
  };
  const double d1 = orient(c, d, a);
  const double d2 = orient(c, d, b);
  const double d3 = orient(a, b, c);
  const double d4 = orient(a, b, d);
  return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

Point rotate(const Point& p, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * p.x() - s * p.y(), s * p.x() + c * p.y()};
}

double wrap01(double t) {
  t -= std::floor(t);
  return t >= 1.0 ? 0.0 : t;
}

// Points of the polygon with every vertex included, n in total, distributed
// over the edges proportionally to edge length.
std::vector<Point> allocate_polygon(const std::vector<Point>& poly, int n) {
  const int m = static_cast<int>(poly.size());
  std::vector<double> len(m);
  double total = 0.0;
  for (int i = 0; i < m; ++i) {
    len[i] = (poly[(i + 1) % m] - poly[i]).norm();
    total += len[i];
  }
  std::vector<int> count(m, 1);
  int used = m;
  // largest-remainder allocation of the remaining points
  std::vector<double> want(m);
  for (int i = 0; i < m; ++i) want[i] = len[i] / total * n;
  while (used < n) {
    int best = 0;
    double best_gap = -1e300;
    for (int i = 0; i < m; ++i) {
      const double gap = want[i] - count[i];
      if (gap > best_gap) {
        best_gap = gap;
        best = i;
      }
    }
    ++count[best];
    ++used;
  }
  std::vector<Point> pts;
  pts.reserve(n);
  for (int i = 0; i < m; ++i) {
    const Point& a = poly[i];
    const Point& b = poly[(i + 1) % m];
    for (int j = 0; j < count[i]; ++j) pts.push_back(a + (b - a) * (static_cast<double>(j) / count[i]));
  }
  return pts;
}

}  // namespace

Point unit_circle_point(double t) {
  const double a = 2.0 * pi * t;
  return {std::cos(a), std::sin(a)};
}

Point unit_square_point(double t) {
  // arclength 8 in total; start at (1,0) going counter-clockwise
  double s = wrap01(t) * 8.0;
  if (s < 1.0) return {1.0, s};
  s -= 1.0;
  if (s < 2.0) return {1.0 - s, 1.0};
  s -= 2.0;
  if (s < 2.0) return {-1.0, 1.0 - s};
  s -= 2.0;
  if (s < 2.0) return {-1.0 + s, -1.0};
  s -= 2.0;
  return {1.0, -1.0 + s};
}

double signed_area(const std::vector<Point>& polygon) {
  double a = 0.0;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point& p = polygon[i];
    const Point& q = polygon[(i + 1) % n];
    a += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * a;
}

HoleShape HoleShape::disk(double radius) {
  HoleShape h;
  h.kind = HoleKind::disk;
  h.size = radius;
  return h;
}

HoleShape HoleShape::square(double half_side, double rotation) {
  HoleShape h;
  h.kind = HoleKind::square;
  h.size = half_side;
  h.rotation = rotation;
  return h;
}

HoleShape HoleShape::make_polygon(std::vector<Point> vertices) {
  HoleShape h;
  h.kind = HoleKind::polygon;
  h.size = 1.0;
  h.polygon = std::move(vertices);
  return h;
}

void HoleShape::validate() const {
  if (!(size > 0.0) || !std::isfinite(size)) throw InvalidSpec("hole size must be positive and finite");
  if (kind != HoleKind::polygon) return;
  const std::size_t n = polygon.size();
  if (n < 3) throw InvalidSpec("polygon hole needs at least 3 vertices");
  if (!(signed_area(polygon) > 0.0)) throw InvalidSpec("polygon hole must be positively oriented");
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;
      if (segments_cross(polygon[i], polygon[(i + 1) % n], polygon[j], polygon[(j + 1) % n]))
        throw InvalidSpec("polygon hole is self-intersecting");
    }
  }
  // star-shaped about the origin: every edge seen counter-clockwise
  for (std::size_t i = 0; i < n; ++i) {
    const Point& a = polygon[i];
    const Point& b = polygon[(i + 1) % n];
    if (!(a.x() * b.y() - a.y() * b.x() > 0.0))
      throw InvalidSpec("polygon hole must be star-shaped with respect to its center");
  }
}

double HoleShape::max_radius() const {
  switch (kind) {
    case HoleKind::disk:
      return size;
    case HoleKind::square:
      return size * std::sqrt(2.0);
    case HoleKind::polygon: {
      double r = 0.0;
      for (const auto& p : polygon) r = std::max(r, p.norm());
      return r * size;
    }
  }
  return size;
}

double HoleShape::area() const {
  switch (kind) {
    case HoleKind::disk:
      return pi * size * size;
    case HoleKind::square:
      return 4.0 * size * size;
    case HoleKind::polygon:
      return signed_area(polygon) * size * size;
  }
  return 0.0;
}

double HoleShape::unit_perimeter() const {
  switch (kind) {
    case HoleKind::disk:
      return 2.0 * pi;
    case HoleKind::square:
      return 8.0;
    case HoleKind::polygon: {
      double s = 0.0;
      for (std::size_t i = 0; i < polygon.size(); ++i)
        s += (polygon[(i + 1) % polygon.size()] - polygon[i]).norm();
      return s;
    }
  }
  return 2.0 * pi;
}

Point HoleShape::unit_point(double t, int n) const {
  switch (kind) {
    case HoleKind::disk:
      return unit_circle_point(t);
    case HoleKind::square: {
      const double step = 2.0 * pi / n;
      const long k = std::lround(rotation / step);
      const double q = static_cast<double>(k) / n;
      return rotate(unit_square_point(t - q), 2.0 * pi * q);
    }
    case HoleKind::polygon: {
      const auto pts = allocate_polygon(polygon, n);
      const double s = wrap01(t) * n;
      const int i = static_cast<int>(std::floor(s));
      const double f = s - i;
      const Point& a = pts[i % n];
      const Point& b = pts[(i + 1) % n];
      return rotate(a + (b - a) * f, rotation);
    }
  }
  return unit_circle_point(t);
}

std::vector<Point> HoleShape::boundary_points(int n) const {
  std::vector<Point> pts(n);
  for (int i = 0; i < n; ++i) pts[i] = size * unit_point(static_cast<double>(i) / n, n);
  return pts;
}

double HoleShape::polygonal_area(int n) const { return signed_area(boundary_points(n)); }

std::string HoleShape::describe() const {
  std::ostringstream os;
  switch (kind) {
    case HoleKind::disk:
      os << "disk(r=" << size << ")";
      break;
    case HoleKind::square:
      os << "square(h=" << size << ", rot=" << rotation << ")";
      break;
    case HoleKind::polygon:
      os << "polygon(" << polygon.size() << " vertices, scale=" << size << ")";
      break;
  }
  return os.str();
}

void DomainSpec::validate() const {
  if (dimension != 2) throw InvalidSpec("only d = 2 is executable");
  if (!(half_size >= 1.0)) throw InvalidSpec("outer domain must contain the unit ball (L >= 1)");
  if (outer == OuterKind::disk && !(half_size > 1.0))
    throw InvalidSpec("outer disk must strictly contain the unit ball");
  hole.validate();
  if (!(epsilon > 0.0)) throw InvalidSpec("epsilon must be positive");
  if (!(epsilon * hole.max_radius() < 0.5)) {
    std::ostringstream os;
    os << "eps * closure(T) is not inside B_{1/2}: eps = " << epsilon << ", max radius of T = " << hole.max_radius();
    throw InvalidSpec(os.str());
  }
}

double DomainSpec::outer_area() const {
  return outer == OuterKind::square ? 4.0 * half_size * half_size : pi * half_size * half_size;
}

}  // namespace holelab
