#include <doctest.h>

#include "holelab/bogovskii.hpp"
#include "holelab/errors.hpp"

#include <cmath>
#include <map>
#include <memory>

using namespace holelab;

namespace {

const PerforatedMesh& cells(int n, double alpha) {
  static std::map<std::pair<int, double>, std::unique_ptr<PerforatedMesh>> cache;
  auto& slot = cache[{n, alpha}];
  if (!slot)
    slot = std::make_unique<PerforatedMesh>(build_perforated(n, alpha, HoleShape::disk(0.25), 0.375, 0), 16, 0.25);
  return *slot;
}

}  // namespace

TEST_SUITE("bogovskii_op") {

TEST_CASE("integration and mean removal") {
  const TriMesh m = mesh_rectangle(0, 0, 1, 1, 4, 4);
  const ScalarField x1 = ScalarField::closed_form([](const Point& x) { return x[0] * x[0]; });
  CHECK(integrate(m, x1) == doctest::Approx(1.0 / 3).epsilon(1e-14));
  const ScalarField f = remove_mean(m, x1);
  CHECK(f.pointwise());
  CHECK(f.at(Point(0.5, 0.2)) == doctest::Approx(0.25 - 1.0 / 3));
  CHECK(std::abs(integrate(m, f)) < 1e-15);
  CHECK_NOTHROW(check_mean_zero(m, f));
  CHECK_THROWS_AS(check_mean_zero(m, x1), PreconditionError);
}

TEST_CASE("zero extension preserves norms exactly and vanishes on holes") {
  const PerforatedMesh& pm = cells(4, 1.0);
  for (std::uint64_t seed : {1u, 2u}) {
    for (const ScalarField& f : {random_mean_zero(pm, seed), random_smooth_mean_zero(pm, seed)}) {
      const ScalarField e = zero_extend(pm, f);
      for (double p : {4.0 / 3, 2.0, 3.0}) CHECK(lp_norm(*pm.full(), e, p).value == lp_norm(*pm.fluid(), f, p).value);
      for_each_quad_point(*pm.full(), 6, [&](const QuadPoint& q, double) {
        if (pm.fluid_triangle(q.triangle) < 0) CHECK(e(q) == 0.0);
      });
      CHECK(std::abs(integrate(*pm.full(), e)) <= 1e-12 * lp_norm(*pm.full(), e, 1.0).value);
    }
  }
  const ScalarField one = ScalarField::closed_form([](const Point&) { return 1.0; });
  CHECK_THROWS_AS(zero_extend(pm, one), PreconditionError);
}

TEST_CASE("random right-hand sides are reproducible and mean zero") {
  const PerforatedMesh& pm = cells(4, 2.0);
  const ScalarField a = random_mean_zero(pm, 5), b = random_mean_zero(pm, 5), c = random_mean_zero(pm, 6);
  bool differs = false;
  for_each_quad_point(*pm.fluid(), 4, [&](const QuadPoint& q, double) {
    CHECK(a(q) == b(q));
    differs = differs || a(q) != c(q);
  });
  CHECK(differs);
  CHECK_NOTHROW(check_mean_zero(*pm.fluid(), a));

  // the smooth family is the same function up to a constant on every mesh
  const ScalarField s4 = random_smooth_mean_zero(cells(4, 2.0), 3);
  const ScalarField s2 = random_smooth_mean_zero(cells(2, 2.0), 3);
  const Point x(0.13, 0.71), y(0.62, 0.29);
  CHECK(s4.at(x) - s4.at(y) == doctest::Approx(s2.at(x) - s2.at(y)).epsilon(1e-14));
  CHECK_NOTHROW(check_mean_zero(*cells(4, 2.0).fluid(), s4, 10));
}

TEST_CASE("divergence identity on the perforated domain") {
  for (double alpha : {1.0, 2.0}) {
    const PerforatedMesh& pm = cells(4, alpha);
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      for (const ScalarField& f : {random_smooth_mean_zero(pm, seed), random_mean_zero(pm, seed)}) {
        const BogovskiiResult b = bogovskii_perforated(pm, f);
        CHECK(divergence_residual(pm, b.velocity, f) <= 1e-8);
        CHECK(b.max_mismatch <= 1e-8);
      }
    }
  }
}

TEST_CASE("reference solution is divergence free inside the holes") {
  const PerforatedMesh& pm = cells(4, 1.0);
  const ScalarField f = random_smooth_mean_zero(pm, 1);
  const BogovskiiResult b = bogovskii_perforated(pm, f);
  const PressureSpace& q = *pm.broken_pressure();
  const Eigen::VectorXd d = divergence_moments(*pm.full(), q, b.reference.velocity);
  const Eigen::VectorXd g = gradient_moments(*pm.full(), q, b.reference.velocity);
  for (int i = 0; i < q.size(); ++i)
    if (q.dof_label(i) > 0) CHECK(std::abs(d[i]) <= 1e-10 * g.norm());
}

TEST_CASE("composition: outside the balls the result is the reference field") {
  const PerforatedMesh& pm = cells(4, 2.0);
  const ScalarField f = random_smooth_mean_zero(pm, 2);
  const BogovskiiResult b = bogovskii_perforated(pm, f);
  const Eigen::VectorXd ref = pm.to_fluid(b.reference.velocity);
  const TriMesh& m = *pm.fluid();
  const PerforatedDomain& pd = pm.domain();
  for (int i = 0; i < m.num_quadratic_nodes(); ++i) {
    bool inside = false;
    for (const Point& c : pd.centers) inside = inside || (m.node(i) - c).norm() < pd.ball_radius() * (1 - 1e-9);
    if (inside) continue;
    CHECK(b.velocity[2 * i] == ref[2 * i]);
    CHECK(b.velocity[2 * i + 1] == ref[2 * i + 1]);
  }
}

TEST_CASE("linearity") {
  const PerforatedMesh& pm = cells(4, 1.0);
  const ScalarField f = random_smooth_mean_zero(pm, 1), g = random_mean_zero(pm, 2);
  const ScalarField h = ScalarField::from_quad([f, g](const QuadPoint& q) { return 2.0 * f(q) - 0.5 * g(q); }, "h");
  const Eigen::VectorXd lhs = bogovskii_perforated(pm, h).velocity;
  const Eigen::VectorXd rhs = 2.0 * bogovskii_perforated(pm, f).velocity - 0.5 * bogovskii_perforated(pm, g).velocity;
  CHECK((lhs - rhs).lpNorm<Eigen::Infinity>() <= 1e-10 * rhs.lpNorm<Eigen::Infinity>());
}

TEST_CASE("zero right-hand side") {
  const PerforatedMesh& pm = cells(2, 1.0);
  const BogovskiiResult b = bogovskii_perforated(pm, ScalarField::zero());
  CHECK(b.velocity.lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("norm of the operator") {
  const PerforatedMesh& pm = cells(4, 2.0);
  const ScalarField f = random_smooth_mean_zero(pm, 1);
  const BogovskiiResult b = bogovskii_perforated(pm, f);
  const BogovskiiNorm n = bogovskii_norm(pm, b.velocity, f, 2.0);
  CHECK(n.epsilon == 0.25);
  CHECK(n.exponent == doctest::Approx(-1.0));
  const double g = lp_norm_gradient(*pm.fluid(), b.velocity, 2.0).value;
  const double v = lp_norm_velocity(*pm.fluid(), b.velocity, 2.0).value;
  CHECK(n.w_norm == doctest::Approx(std::hypot(g, v)));
  CHECK(n.constant == doctest::Approx(n.w_norm / ((1 + 4.0) * n.f_norm)));
}

}  // TEST_SUITE
