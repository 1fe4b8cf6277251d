#include "holelab/mesher.hpp"

#include "holelab/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <sstream>
#include <unordered_map>

namespace holelab {

namespace {

using Curve = std::function<Point(double)>;

double smoothstep(double x) {
  x = std::clamp(x, 0.0, 1.0);
  return x * x * (3.0 - 2.0 * x);
}

/// Weight of the outer curve in a ring of scale a: rings keep the hole shape
/// inside B_{1/2} and become the outer shape at 3/4 of the outer scale.
double outer_blend(double a, double L) {
  const double full = std::max(0.75 * L, 0.75);
  return a <= 0.5 ? 0.0 : smoothstep((a - 0.5) / (full - 0.5));
}

double min_angle(const Point& a, const Point& b, const Point& c) {
  auto ang = [](const Point& p, const Point& q, const Point& r) {
    const Vec2 u = q - p;
    const Vec2 v = r - p;
    return std::atan2(std::abs(u.x() * v.y() - u.y() * v.x()), u.dot(v));
  };
  return std::min({ang(a, b, c), ang(b, c, a), ang(c, a, b)});
}

class Builder {
public:
  TriMesh mesh;

  int add_vertex(const Point& p) {
    mesh.vertices.push_back(p);
    return mesh.num_vertices() - 1;
  }

  std::vector<int> add_ring(const std::vector<Point>& pts) {
    std::vector<int> ids(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) ids[i] = add_vertex(pts[i]);
    return ids;
  }

  void add_triangle(int a, int b, int c, int region) {
    const Point& pa = mesh.vertices[a];
    const Point& pb = mesh.vertices[b];
    const Point& pc = mesh.vertices[c];
    const double det = (pb.x() - pa.x()) * (pc.y() - pa.y()) - (pb.y() - pa.y()) * (pc.x() - pa.x());
    if (!(det > 0.0)) throw GradingFailure("ring construction produced an inverted triangle; grading cannot be realized");
    mesh.triangles.push_back({a, b, c});
    mesh.regions.push_back(region);
  }

  /// Connect two closed rings, both counter-clockwise and starting at t = 0.
  /// The outer ring has as many points as the inner one or twice as many.
  void stitch(const std::vector<int>& inner, const std::vector<int>& outer, int region) {
    const std::size_t n = inner.size();
    if (outer.size() == n) {
      for (std::size_t i = 0; i < n; ++i) {
        const int a0 = inner[i], a1 = inner[(i + 1) % n];
        const int b0 = outer[i], b1 = outer[(i + 1) % n];
        const auto& v = mesh.vertices;
        const double first = std::min(min_angle(v[a0], v[b0], v[b1]), min_angle(v[a0], v[b1], v[a1]));
        const double second = std::min(min_angle(v[a0], v[b0], v[a1]), min_angle(v[a1], v[b0], v[b1]));
        if (first >= second) {
          add_triangle(a0, b0, b1, region);
          add_triangle(a0, b1, a1, region);
        } else {
          add_triangle(a0, b0, a1, region);
          add_triangle(a1, b0, b1, region);
        }
      }
    } else if (outer.size() == 2 * n) {
      // each pentagon (a_i, b_2i, b_2i+1, b_2i+2, a_i+1) is triangulated by
      // the best fan; the fan from b_2i+1 comes first so it wins ties
      for (std::size_t i = 0; i < n; ++i) {
        const std::array<int, 5> poly{inner[i], outer[2 * i], outer[2 * i + 1], outer[(2 * i + 2) % (2 * n)],
                                      inner[(i + 1) % n]};
        int best = -1;
        double best_angle = -1.0;
        for (int apex : {2, 0, 4, 1, 3}) {
          double worst = 10.0;
          for (int j = 1; j <= 3; ++j) {
            const Point& p0 = mesh.vertices[poly[apex]];
            const Point& p1 = mesh.vertices[poly[(apex + j) % 5]];
            const Point& p2 = mesh.vertices[poly[(apex + j + 1) % 5]];
            const double det = (p1.x() - p0.x()) * (p2.y() - p0.y()) - (p1.y() - p0.y()) * (p2.x() - p0.x());
            worst = det > 0.0 ? std::min(worst, min_angle(p0, p1, p2)) : -1.0;
            if (worst < 0.0) break;
          }
          if (worst > best_angle) {
            best_angle = worst;
            best = apex;
          }
        }
        for (int j = 1; j <= 3; ++j) add_triangle(poly[best], poly[(best + j) % 5], poly[(best + j + 1) % 5], region);
      }
    } else {
      throw GradingFailure("ring sizes cannot be stitched");
    }
  }

  void fan(int center, const std::vector<int>& ring, int region) {
    const std::size_t n = ring.size();
    for (std::size_t i = 0; i < n; ++i) add_triangle(center, ring[i], ring[(i + 1) % n], region);
  }

  void tag_ring(const std::vector<int>& ring, int tag) {
    const std::size_t n = ring.size();
    for (std::size_t i = 0; i < n; ++i) mesh.tagged_edges.push_back({ring[i], ring[(i + 1) % n], tag});
  }
};

std::vector<Point> ring_points(const Point& center, double a, double w, const Curve& inner, const Curve& outer, int n) {
  std::vector<Point> pts(n);
  for (int i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / n;
    Point s = inner(t);
    if (w > 0.0) s = (1.0 - w) * s + w * outer(t);
    pts[i] = center + a * s;
  }
  return pts;
}

/// Fill the inside of a closed ring with rings of halving size and a fan.
void fill_inward(Builder& b, const std::vector<int>& ring, const Point& center, double a0, const HoleShape& shape,
                 int n_shape, int region) {
  const Curve inner = [&](double t) { return shape.unit_point(t, n_shape); };
  double mean_r = 0.0;
  for (int i = 0; i < n_shape; ++i) mean_r += inner(static_cast<double>(i) / n_shape).norm();
  mean_r /= n_shape;
  const double p_eff = shape.unit_perimeter() / mean_r;
  std::vector<int> cur = ring;
  int n = static_cast<int>(ring.size());
  double rho = 1.0;
  while (n > 12 && n % 2 == 0) {
    const int n2 = n / 2;
    rho /= 1.0 + 2.0 * p_eff / n;
    auto next = b.add_ring(ring_points(center, a0 * rho, 0.0, inner, inner, n2));
    b.stitch(next, cur, region);
    cur = std::move(next);
    n = n2;
  }
  const int c = b.add_vertex(center);
  b.fan(c, cur, region);
}

/// Every generator refuses meshes violating the minimum-angle bound.
TriMesh checked(Builder& b, const char* what) {
  b.mesh.finalize();
  const double angle = b.mesh.min_angle_degrees();
  if (angle < 20.0) {
    std::ostringstream os;
    os << what << ": minimum angle " << angle << " degrees is below 20; refine n_hole or shrink the hole";
    throw GradingFailure(os.str());
  }
  return std::move(b.mesh);
}

struct RingPlan {
  double a;
  int n;
};

/// Outward rings from scale a0 (hole curve) to scale L (outer curve).
std::vector<RingPlan> plan_rings(double a0, double L, double h_far, int n0, double p_in, double p_out) {
  const int m = rings_per_octave(p_in, n0);
  const double q = std::exp2(1.0 / m);
  auto lattice = [&](int j) { return a0 * std::ldexp(std::exp2(static_cast<double>(j % m) / m), j / m); };
  auto blend = [&](double a) { return outer_blend(a, L); };
  auto perim = [&](double a) {
    const double w = blend(a);
    return (1.0 - w) * p_in + w * p_out;
  };
  std::vector<RingPlan> plan{{a0, n0}};
  int j = 0;
  double a = a0;
  int n = n0;
  auto push = [&](double next) {
    const double dn = std::min(next * (q - 1.0), h_far);
    if (next * perim(next) / n > 1.5 * dn) n *= 2;
    if (n > (1 << 22)) throw GradingFailure("angular refinement exceeds the supported vertex count");
    plan.push_back({next, n});
    a = next;
  };
  while (true) {
    const double d = std::min(a * (q - 1.0), h_far);
    const double rem = L - a;
    if (rem <= 1.2 * d) {
      push(L);
      break;
    }
    if (rem <= 2.4 * d) {
      push(0.5 * (a + L));
      push(L);
      break;
    }
    if (a * (q - 1.0) <= h_far)
      push(lattice(++j));
    else
      push(a + h_far);
  }
  if (plan.size() < 3) {
    std::ostringstream os;
    os << "only " << plan.size() - 1 << " ring layer(s) fit between the hole (scale " << a0 << ") and the outer boundary (L = "
       << L << ")";
    throw GradingFailure(os.str());
  }
  return plan;
}

TriMesh ring_mesh(const DomainSpec& spec, const HoleShape& shape, double a0, double h_far, int n0, bool filled) {
  if (!(h_far > 0.0) || h_far > spec.half_size / 4.0 * (1.0 + 1e-12))
    throw InvalidSpec("h_far must lie in (0, L/4]");
  if (n0 < 16 || n0 % 8 != 0) throw InvalidSpec("n_hole must be at least 16 and a multiple of 8");
  const double L = spec.half_size;
  const Curve inner = [&](double t) { return shape.unit_point(t, n0); };
  const Curve outer = spec.outer == OuterKind::square ? Curve(unit_square_point) : Curve(unit_circle_point);
  const double p_out = spec.outer == OuterKind::square ? 8.0 : 2.0 * pi;
  const auto plan = plan_rings(a0, L, h_far, n0, shape.unit_perimeter(), p_out);

  Builder b;
  const Point origin(0.0, 0.0);
  std::vector<int> prev;
  for (std::size_t r = 0; r < plan.size(); ++r) {
    const double a = plan[r].a;
    double w = outer_blend(a, L);
    if (r + 1 == plan.size()) w = 1.0;
    auto ids = b.add_ring(ring_points(origin, a, w, inner, outer, plan[r].n));
    if (r == 0) {
      if (!filled) b.tag_ring(ids, edge_tag::hole(0));
    } else {
      b.stitch(prev, ids, region::fluid);
    }
    prev = std::move(ids);
  }
  b.tag_ring(prev, edge_tag::outer);
  if (filled) {
    // the first ring is re-derived from the vertex list to seed the fill
    std::vector<int> first(plan[0].n);
    for (int i = 0; i < plan[0].n; ++i) first[i] = i;
    fill_inward(b, first, origin, a0, shape, n0, region::fluid);
  }
  return checked(b, filled ? "mesh_without_hole" : "mesh_single_hole");
}

/// Rings from the hole (scale a0 about center) to the circle of radius R.
/// Returns the hole ring and the circle ring.
std::pair<std::vector<int>, std::vector<int>> annulus_rings(Builder& b, const Point& center, const HoleShape& shape,
                                                            double a0, double R, int n, int region) {
  const Curve inner = [&](double t) { return shape.unit_point(t, n); };
  const Curve circle = unit_circle_point;
  const int m = rings_per_octave(shape.unit_perimeter(), n);
  const double q = std::exp2(1.0 / m);
  const int layers = std::max(1, static_cast<int>(std::lround(std::log(R / a0) / std::log(q))));
  std::vector<int> first, prev;
  for (int j = 0; j <= layers; ++j) {
    const double s = static_cast<double>(j) / layers;
    const double a = j == layers ? R : a0 * std::pow(R / a0, s);
    const double w = j == layers ? 1.0 : smoothstep(s);
    auto ids = b.add_ring(ring_points(center, a, w, inner, circle, n));
    if (j == 0)
      first = ids;
    else
      b.stitch(prev, ids, region);
    prev = std::move(ids);
  }
  return {first, prev};
}

}  // namespace

int rings_per_octave(double perimeter, int n) {
  return std::max(1, static_cast<int>(std::lround(std::log(2.0) / std::log(1.0 + perimeter / n))));
}

TriMesh mesh_single_hole(const DomainSpec& spec, double h_far, int n_hole) {
  spec.validate();
  return ring_mesh(spec, spec.hole, spec.epsilon * spec.hole.size, h_far, n_hole, false);
}

TriMesh mesh_without_hole(const DomainSpec& spec, double h_far, int n_core, double core) {
  if (!(core > 0.0 && core < 0.5 * spec.half_size)) throw InvalidSpec("core radius must lie in (0, L/2)");
  return ring_mesh(spec, HoleShape::disk(1.0), core, h_far, n_core, true);
}

TriMesh mesh_annulus(const Point& center, double R, const HoleShape& hole, double s, int n_hole) {
  hole.validate();
  if (n_hole < 16 || n_hole % 8 != 0) throw InvalidSpec("n_hole must be at least 16 and a multiple of 8");
  if (!(s > 0.0) || !(s * hole.max_radius() < R)) throw InvalidSpec("hole is not strictly inside the annulus disk");
  Builder b;
  const auto [inner, outer] = annulus_rings(b, center, hole, s * hole.size, R, n_hole, region::fluid);
  b.tag_ring(inner, edge_tag::hole(0));
  b.tag_ring(outer, edge_tag::outer);
  return checked(b, "mesh_annulus");
}

TriMesh mesh_perforated(const PerforatedDomain& pd, int n_hole, double h_far) {
  pd.validate();
  if (n_hole < 16 || n_hole % 8 != 0) throw InvalidSpec("n_hole must be at least 16 and a multiple of 8");
  const int m = n_hole / 4;  // lattice units per cell side
  const int nm = pd.n * m;
  const double eps = pd.epsilon();
  if (eps / m > h_far * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "cell boundary segments of length " << eps / m << " exceed h_far = " << h_far;
    throw GradingFailure(os.str());
  }
  Builder b;
  std::unordered_map<long long, int> lattice;
  auto lattice_vertex = [&](int I, int J) {
    const long long key = static_cast<long long>(I) * (nm + 1) + J;
    auto it = lattice.find(key);
    if (it != lattice.end()) return it->second;
    const int id = b.add_vertex(Point(static_cast<double>(I) / nm, static_cast<double>(J) / nm));
    lattice.emplace(key, id);
    return id;
  };
  auto on_outer = [&](int I0, int J0, int I1, int J1) {
    return (I0 == I1 && (I0 == 0 || I0 == nm)) || (J0 == J1 && (J0 == 0 || J0 == nm));
  };

  for (int k = 0; k < pd.num_cells(); ++k) {
    const int ci = k % pd.n;
    const int cj = k / pd.n;
    const Point& xk = pd.centers[k];
    const HoleShape shape = pd.cell_hole(k);
    const double a0 = shape.size;
    const double R = pd.ball_radius();

    const auto [hole_ring, ball_ring] = annulus_rings(b, xk, shape, a0, R, n_hole, region::ball_annulus(k));
    b.tag_ring(hole_ring, edge_tag::hole(k));
    b.tag_ring(ball_ring, edge_tag::ball(k));
    fill_inward(b, hole_ring, xk, a0, shape, n_hole, region::hole_interior(k));

    // cell boundary: walk the lattice counter-clockwise from the middle of the right side
    std::vector<std::array<int, 2>> cell_pts(n_hole);
    for (int s = 0; s < n_hole; ++s) {
      int x, y;
      const int h = m / 2;
      if (s < h) {
        x = m, y = h + s;
      } else if (s < h + m) {
        x = m - (s - h), y = m;
      } else if (s < h + 2 * m) {
        x = 0, y = m - (s - h - m);
      } else if (s < h + 3 * m) {
        x = s - h - 2 * m, y = 0;
      } else {
        x = m, y = s - h - 3 * m;
      }
      cell_pts[s] = {ci * m + x, cj * m + y};
    }
    std::vector<int> square(n_hole);
    for (int s = 0; s < n_hole; ++s) square[s] = lattice_vertex(cell_pts[s][0], cell_pts[s][1]);
    for (int s = 0; s < n_hole; ++s) {
      const auto& p0 = cell_pts[s];
      const auto& p1 = cell_pts[(s + 1) % n_hole];
      if (on_outer(p0[0], p0[1], p1[0], p1[1])) b.mesh.tagged_edges.push_back({square[s], square[(s + 1) % n_hole], edge_tag::outer});
    }

    // fluid layers between the ball circle and the cell boundary
    double gap = 0.0;
    for (int s = 0; s < n_hole; ++s) gap += (b.mesh.vertices[square[s]] - b.mesh.vertices[ball_ring[s]]).norm();
    gap /= n_hole;
    const double tang = 0.5 * (2.0 * pi * R / n_hole + eps / m);
    const int layers = std::max(1, static_cast<int>(std::lround(gap / tang)));
    std::vector<int> prev = ball_ring;
    for (int j = 1; j < layers; ++j) {
      const double s = static_cast<double>(j) / layers;
      std::vector<Point> pts(n_hole);
      for (int i = 0; i < n_hole; ++i)
        pts[i] = (1.0 - s) * b.mesh.vertices[ball_ring[i]] + s * b.mesh.vertices[square[i]];
      auto ids = b.add_ring(pts);
      b.stitch(prev, ids, region::fluid);
      prev = std::move(ids);
    }
    b.stitch(prev, square, region::fluid);
  }
  return checked(b, "mesh_perforated");
}

TriMesh mesh_rectangle(double x0, double y0, double x1, double y1, int nx, int ny) {
  if (nx < 1 || ny < 1 || !(x1 > x0) || !(y1 > y0)) throw InvalidSpec("degenerate rectangle mesh request");
  Builder b;
  auto grid = [&](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      b.add_vertex(Point(x0 + (x1 - x0) * i / nx, y0 + (y1 - y0) * j / ny));
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int c = b.add_vertex(Point(x0 + (x1 - x0) * (i + 0.5) / nx, y0 + (y1 - y0) * (j + 0.5) / ny));
      const int v00 = grid(i, j), v10 = grid(i + 1, j), v11 = grid(i + 1, j + 1), v01 = grid(i, j + 1);
      b.add_triangle(c, v00, v10, region::fluid);
      b.add_triangle(c, v10, v11, region::fluid);
      b.add_triangle(c, v11, v01, region::fluid);
      b.add_triangle(c, v01, v00, region::fluid);
    }
  }
  for (int i = 0; i < nx; ++i) {
    b.mesh.tagged_edges.push_back({grid(i, 0), grid(i + 1, 0), edge_tag::outer});
    b.mesh.tagged_edges.push_back({grid(i, ny), grid(i + 1, ny), edge_tag::outer});
  }
  for (int j = 0; j < ny; ++j) {
    b.mesh.tagged_edges.push_back({grid(0, j), grid(0, j + 1), edge_tag::outer});
    b.mesh.tagged_edges.push_back({grid(nx, j), grid(nx, j + 1), edge_tag::outer});
  }
  return checked(b, "mesh_rectangle");
}

}  // namespace holelab
