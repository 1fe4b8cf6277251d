#include "holelab/lp_norms.hpp"

#include "holelab/errors.hpp"
#include "holelab/parallel.hpp"

#include <cmath>
#include <sstream>

namespace holelab {

namespace {

/// sum over triangles and rule points of w * g(q)^p with g >= 0, summed per
/// triangle first and then in triangle order.
template <class G>
double power_integral(const TriMesh& mesh, int degree, double p, const TriangleMask* mask, G&& g) {
  const QuadRule& rule = triangle_rule(degree);
  const int nt = mesh.num_triangles();
  if (mask && static_cast<int>(mask->size()) != nt) throw PreconditionError("triangle mask has the wrong length");
  std::vector<double> local(nt, 0.0);
  parallel_chunks(nt, default_chunks(nt), [&](int, int b, int e) {
    for (int t = b; t < e; ++t) {
      if (mask && !(*mask)[t]) continue;
      const double area = mesh.triangle_area(t);
      double acc = 0.0;
      for (int i = 0; i < rule.size(); ++i) {
        const auto& l = rule.bary[i];
        const double v = g(QuadPoint{t, i, degree, map_to_triangle(mesh, t, l), l});
        if (!std::isfinite(v)) throw DomainError("non-finite field value in an L^p integrand");
        acc += rule.weights[i] * (p == 2.0 ? v * v : std::pow(v, p));
      }
      local[t] = area * acc;
    }
  });
  double sum = 0.0;
  for (double v : local) sum += v;
  return sum;
}

void check_exponent(double p, int degree) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw DomainError("L^p exponent must be finite and at least 1");
  if (degree < 4) throw PreconditionError("L^p quadrature needs degree >= 4");
}

template <class G>
NormValue escalated(const TriMesh& mesh, double p, int degree, const TriangleMask* mask, G&& g) {
  check_exponent(p, degree);
  NormValue out;
  out.value = std::pow(power_integral(mesh, degree, p, mask, g), 1.0 / p);
  const double fine = std::pow(power_integral(mesh, degree + 2, p, mask, g), 1.0 / p);
  out.error_estimate = std::abs(fine - out.value);
  return out;
}

template <class T, class Mag>
NormValue field_norm(const TriMesh& mesh, const Field<T>& f, double p, int degree, const TriangleMask* mask, Mag mag) {
  if (!f.valid()) throw PreconditionError("L^p norm of an empty field");
  f.check_mesh(mesh);
  if (const auto td = f.table_degree()) {
    check_exponent(p, *td);
    NormValue out;
    out.value = std::pow(power_integral(mesh, *td, p, mask, [&](const QuadPoint& q) { return mag(f(q)); }), 1.0 / p);
    out.estimated = false;
    return out;
  }
  return escalated(mesh, p, degree, mask, [&](const QuadPoint& q) { return mag(f(q)); });
}

}  // namespace

double conjugate(double p) {
  if (!(p > 1.0)) throw DomainError("conjugate exponent needs p > 1");
  if (std::isinf(p)) return 1.0;
  return p / (p - 1.0);
}

double sobolev_star(double p, int d) {
  if (!(p > 1.0) || !(p < d)) {
    std::ostringstream os;
    os << "Sobolev exponent needs 1 < p < d (p = " << p << ", d = " << d << ")";
    throw DomainError(os.str());
  }
  return d * p / (d - p);
}

NormValue lp_norm(const TriMesh& mesh, const ScalarField& f, double p, int degree, const TriangleMask* mask) {
  return field_norm(mesh, f, p, degree, mask, [](double v) { return std::abs(v); });
}

NormValue lp_norm(const TriMesh& mesh, const VectorField& f, double p, int degree, const TriangleMask* mask) {
  return field_norm(mesh, f, p, degree, mask, [](const Vec2& v) { return v.norm(); });
}

NormValue lp_norm(const TriMesh& mesh, const TensorField& f, double p, int degree, const TriangleMask* mask) {
  return field_norm(mesh, f, p, degree, mask, [](const Mat2& v) { return v.norm(); });
}

NormValue lp_norm_gradient(const TriMesh& mesh, const Eigen::VectorXd& v, double p, int degree, const TriangleMask* mask) {
  return escalated(mesh, p, degree, mask,
                   [&](const QuadPoint& q) { return p2_gradient(mesh, v, q.triangle, q.bary).norm(); });
}

NormValue lp_norm_velocity(const TriMesh& mesh, const Eigen::VectorXd& v, double p, int degree, const TriangleMask* mask) {
  return escalated(mesh, p, degree, mask,
                   [&](const QuadPoint& q) { return p2_value(mesh, v, q.triangle, q.bary).norm(); });
}

NormValue lp_norm_pressure(const PressureSpace& space, const TriMesh& mesh, const Eigen::VectorXd& pr, double p,
                           int degree, const TriangleMask* mask) {
  return escalated(mesh, p, degree, mask,
                   [&](const QuadPoint& q) { return std::abs(p1_value(space, pr, q.triangle, q.bary)); });
}

NormReport norm_report(const StokesSolution& s, const TensorField& G, double p, int degree) {
  const TriMesh& mesh = *s.mesh;
  const Eigen::VectorXd pressure = s.pressure.array() - s.pressure_mean;
  const NormValue gv = lp_norm_gradient(mesh, s.velocity, p, degree);
  const NormValue pv = lp_norm_pressure(*s.pressure_space, mesh, pressure, p, degree);
  const NormValue vv = lp_norm_velocity(mesh, s.velocity, p, degree);
  const NormValue sv = lp_norm(mesh, G, p, degree);
  NormReport r;
  r.p = p;
  r.grad_velocity_lp = gv.value;
  r.pressure_lp = pv.value;
  r.velocity_lp = vv.value;
  r.source_lp = sv.value;
  for (const NormValue* n : {&gv, &pv, &vv, &sv})
    if (n->value > 0) r.quadrature_error = std::max(r.quadrature_error, n->error_estimate / n->value);
  r.flagged = r.quadrature_error > 0.01;
  return r;
}

double estimate_ratio(const NormReport& r) {
  if (!(r.source_lp > 0)) throw DomainError("estimate ratio undefined: ||G||_p = 0");
  return (r.grad_velocity_lp + r.pressure_lp) / r.source_lp;
}

double estimate_ratio(const StokesSolution& s, const TensorField& G, double p, int degree) {
  return estimate_ratio(norm_report(s, G, p, degree));
}

}  // namespace holelab
