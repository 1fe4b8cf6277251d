#include "holelab/bogovskii.hpp"

#include "holelab/errors.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace holelab {

double integrate(const TriMesh& mesh, const ScalarField& f, int degree, const TriangleMask* mask) {
  if (!f.valid()) throw PreconditionError("integral of an empty field");
  f.check_mesh(mesh);
  if (const auto td = f.table_degree()) degree = *td;
  const QuadRule& rule = triangle_rule(degree);
  double sum = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    if (mask && !(*mask)[t]) continue;
    double acc = 0.0;
    for (int i = 0; i < rule.size(); ++i)
      acc += rule.weights[i] * f(QuadPoint{t, i, degree, map_to_triangle(mesh, t, rule.bary[i]), rule.bary[i]});
    sum += mesh.triangle_area(t) * acc;
  }
  return sum;
}

ScalarField remove_mean(const TriMesh& mesh, const ScalarField& f, int degree) {
  const double mean = integrate(mesh, f, degree) / mesh.area();
  if (f.pointwise()) return ScalarField::closed_form([f, mean](const Point& x) { return f.at(x) - mean; }, f.label());
  return ScalarField::from_quad([f, mean](const QuadPoint& q) { return f(q) - mean; }, f.label());
}

void check_mean_zero(const TriMesh& mesh, const ScalarField& f, int degree) {
  const double area = mesh.area();
  const double mean = integrate(mesh, f, degree) / area;
  const double rms = lp_norm(mesh, f, 2.0, std::max(degree, 4)).value / std::sqrt(area);
  if (std::abs(mean) > 1e-10 * rms) {
    std::ostringstream os;
    os << "field must have zero mean (mean " << mean << ", rms " << rms << ")";
    throw PreconditionError(os.str());
  }
}

ScalarField zero_extend(const PerforatedMesh& pm, const ScalarField& f_fluid) {
  check_mean_zero(*pm.fluid(), f_fluid);
  const MeshPtr fluid = pm.fluid();
  auto to_fluid = std::make_shared<std::vector<int>>(pm.full()->num_triangles());
  for (int t = 0; t < pm.full()->num_triangles(); ++t) (*to_fluid)[t] = pm.fluid_triangle(t);
  return ScalarField::from_quad(
      [f_fluid, fluid, to_fluid](const QuadPoint& q) {
        const int t = (*to_fluid)[q.triangle];
        if (t < 0) return 0.0;
        return f_fluid(QuadPoint{t, q.index, q.degree, map_to_triangle(*fluid, t, q.bary), q.bary});
      },
      "zero extension of " + f_fluid.label());
}

StokesSolution bogovskii_reference(std::shared_ptr<const StokesOperator> op, const ScalarField& f) {
  check_mean_zero(op->mesh(), f);
  return solve_prescribed_divergence(op, f, Dirichlet::zero(op->mesh()));
}

BogovskiiResult bogovskii_perforated(const PerforatedMesh& pm, const ScalarField& f_fluid) {
  const ScalarField extended = zero_extend(pm, f_fluid);
  BogovskiiResult out;
  auto op = pm.full_operator();
  out.reference = solve_prescribed_divergence(op, extended, Dirichlet::zero(op->mesh()));
  RestrictionResult r = restrict_field(pm, out.reference.velocity);
  out.velocity = std::move(r.velocity);
  out.max_mismatch = r.max_mismatch;
  return out;
}

double divergence_residual(const PerforatedMesh& pm, const Eigen::VectorXd& w_fluid, const ScalarField& f_fluid) {
  const TriMesh& mesh = *pm.fluid();
  const PressureSpace& space = pm.fluid_operator()->pressure_space();
  const Eigen::VectorXd target = field_moments(mesh, space, f_fluid);
  const Eigen::VectorXd diff = divergence_moments(mesh, space, w_fluid) - target;
  const double scale = target.norm();
  if (scale == 0.0) return diff.norm();
  return diff.norm() / scale;
}

ScalarField random_mean_zero(const PerforatedMesh& pm, std::uint64_t seed) {
  const MeshPtr mesh = pm.fluid();
  auto space = std::make_shared<const PressureSpace>(PressureSpace::continuous(*mesh));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::VectorXd coef(space->size());
  for (int i = 0; i < coef.size(); ++i) coef[i] = dist(rng);
  const double mean = integrate(*mesh, p1_field(space, std::make_shared<const Eigen::VectorXd>(coef)), 2) / mesh->area();
  coef.array() -= mean;
  return p1_field(space, std::make_shared<const Eigen::VectorXd>(coef), "random mean-zero P1");
}

ScalarField random_smooth_mean_zero(const PerforatedMesh& pm, std::uint64_t seed, int modes) {
  if (modes < 1) throw PreconditionError("random smooth field needs at least one mode");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  auto a = std::make_shared<std::vector<double>>((modes + 1) * (modes + 1));
  for (double& v : *a) v = dist(rng);
  (*a)[0] = 0.0;
  const ScalarField f = ScalarField::closed_form(
      [a, modes](const Point& x) {
        double s = 0.0;
        for (int j = 0; j <= modes; ++j)
          for (int k = 0; k <= modes; ++k)
            s += (*a)[j * (modes + 1) + k] * std::cos(j * pi * x.x()) * std::cos(k * pi * x.y());
        return s;
      },
      "random smooth mean-zero");
  return remove_mean(*pm.fluid(), f, 10);
}

BogovskiiNorm bogovskii_norm(const PerforatedMesh& pm, const Eigen::VectorXd& w_fluid, const ScalarField& f_fluid,
                             double p) {
  const TriMesh& mesh = *pm.fluid();
  BogovskiiNorm out;
  out.epsilon = pm.epsilon();
  out.exponent = restriction_exponent(p, 2, pm.domain().alpha);
  const double g = lp_norm_gradient(mesh, w_fluid, p).value;
  const double v = lp_norm_velocity(mesh, w_fluid, p).value;
  out.w_norm = std::pow(std::pow(g, p) + std::pow(v, p), 1.0 / p);
  out.f_norm = lp_norm(mesh, f_fluid, p).value;
  const double denom = (1.0 + std::pow(out.epsilon, out.exponent)) * out.f_norm;
  out.constant = denom > 0.0 ? out.w_norm / denom : 0.0;
  return out;
}

}  // namespace holelab
