#include <doctest.h>

#include "holelab/bogovskii.hpp"
#include "holelab/errors.hpp"
#include "holelab/restriction.hpp"

#include <algorithm>
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

Vec2 bump(const Point& x) {
  const double s = std::sin(pi * x[0]) * std::sin(pi * x[1]);
  return Vec2(s * s * (1 + x[0]), s * s * std::cos(2 * x[1]));
}

Vec2 other_bump(const Point& x) {
  const double s = std::sin(pi * x[0]) * std::sin(2 * pi * x[1]);
  return Vec2(s * x[1], -s * s);
}

double h1(const TriMesh& m, const Eigen::VectorXd& u) {
  return std::hypot(lp_norm_gradient(m, u, 2.0).value, lp_norm_velocity(m, u, 2.0).value);
}

/// Divergence-free P2 field on D: the discrete Stokes velocity for the dipole.
Eigen::VectorXd divergence_free(const PerforatedMesh& pm) {
  const TensorField G = TensorField::closed_form([](const Point& x) {
    const double psi = std::pow(x[0] * (1 - x[0]) * x[1] * (1 - x[1]), 2);
    Mat2 m;
    m << 0, psi, -psi, 0;
    return m;
  });
  return solve_div_form(pm.full_operator(), G).velocity;
}

}  // namespace

TEST_SUITE("restriction_op") {

TEST_CASE("restriction exponent") {
  CHECK(restriction_exponent(2, 3, 3) == doctest::Approx(0.0));
  CHECK(restriction_exponent(2, 3, 1) == doctest::Approx(-1.0));
  for (double a : {1.0, 2.0, 3.5}) CHECK(restriction_exponent(2, 2, a) == doctest::Approx(-1.0));
  CHECK(restriction_exponent(1.5, 3, 1) == doctest::Approx(-1.0));
  CHECK_THROWS_AS(restriction_exponent(2.5, 2, 1), DomainError);
  CHECK_THROWS_AS(restriction_exponent(1.0, 3, 1), DomainError);
}

TEST_CASE("perforated domain inclusion arithmetic") {
  const PerforatedDomain a = build_perforated(4, 1.0, HoleShape::disk(0.25), 0.375, 0);
  CHECK(a.cell_hole(5).max_radius() == doctest::Approx(0.25 / 4));
  CHECK(a.ball_radius() == doctest::Approx(0.375 / 4));
  const PerforatedDomain b = build_perforated(4, 2.0, HoleShape::disk(0.25), 0.375, 0);
  CHECK(b.cell_hole(5).max_radius() == doctest::Approx(0.25 / 16));
  CHECK(b.ball_radius() == doctest::Approx(0.375 / 4));
  CHECK(a.centers[5].isApprox(Point(0.375, 0.375)));
}

TEST_CASE("zero field restricts to zero") {
  const PerforatedMesh& pm = cells(2, 1.0);
  const Eigen::VectorXd z = Eigen::VectorXd::Zero(2 * pm.full()->num_quadratic_nodes());
  const RestrictionResult r = restrict_field(pm, z);
  CHECK(r.velocity.lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("extension identity for fields vanishing on the holes") {
  for (double alpha : {1.0, 2.0}) {
    const PerforatedMesh& pm = cells(4, alpha);
    const Eigen::VectorXd u = pm.zero_on_holes(interpolate_p2(*pm.full(), bump));
    const RestrictionResult r = restrict_field(pm, u);
    const Eigen::VectorXd uf = pm.to_fluid(u);
    CHECK(h1(*pm.fluid(), r.velocity - uf) <= 1e-8 * h1(*pm.fluid(), uf));
    CHECK(r.max_mismatch <= 1e-8);
  }
}

TEST_CASE("locality: nothing changes outside the balls") {
  const PerforatedMesh& pm = cells(4, 1.0);
  const Eigen::VectorXd u = interpolate_p2(*pm.full(), bump);
  const RestrictionResult r = restrict_field(pm, u);
  const Eigen::VectorXd uf = pm.to_fluid(u);
  const TriMesh& f = *pm.fluid();
  const PerforatedDomain& pd = pm.domain();
  int changed = 0;
  for (int i = 0; i < f.num_quadratic_nodes(); ++i) {
    const Point x = f.node(i);
    bool inside = false;
    for (const Point& c : pd.centers) inside = inside || (x - c).norm() < pd.ball_radius() * (1 - 1e-9);
    if (inside) {
      changed += r.velocity.segment<2>(2 * i) != uf.segment<2>(2 * i);
      continue;
    }
    CHECK(r.velocity[2 * i] == uf[2 * i]);
    CHECK(r.velocity[2 * i + 1] == uf[2 * i + 1]);
  }
  CHECK(changed > 0);
}

TEST_CASE("restricted fields vanish on the holes and keep the outer trace") {
  const PerforatedMesh& pm = cells(4, 2.0);
  const Eigen::VectorXd u = interpolate_p2(*pm.full(), bump);
  const RestrictionResult r = restrict_field(pm, u);
  const TriMesh& f = *pm.fluid();
  for (int e : f.boundary_edges()) {
    const int tag = *f.edge_tag_of(e);
    if (tag <= 0) continue;
    const auto [a, b] = f.edges()[e];
    for (int node : {a, b, f.num_vertices() + e}) CHECK(r.velocity.segment<2>(2 * node).norm() == 0.0);
  }
}

TEST_CASE("divergence preservation") {
  for (double alpha : {1.0, 2.0}) {
    const PerforatedMesh& pm = cells(4, alpha);
    const Eigen::VectorXd u = divergence_free(pm);
    CHECK(relative_divergence_residual(*pm.full(), *pm.broken_pressure(), u) <= 1e-8);
    const RestrictionResult r = restrict_field(pm, u);
    CHECK(relative_divergence_residual(*pm.fluid(), pm.fluid_operator()->pressure_space(), r.velocity) <= 1e-8);
    for (double m : r.cell_mismatch) CHECK(m <= 1e-8);
  }
}

TEST_CASE("linearity") {
  const PerforatedMesh& pm = cells(4, 1.0);
  const Eigen::VectorXd u = interpolate_p2(*pm.full(), bump), v = interpolate_p2(*pm.full(), other_bump);
  const double a = 0.7, b = -1.3;
  const Eigen::VectorXd lhs = restrict_field(pm, a * u + b * v).velocity;
  const Eigen::VectorXd rhs = a * restrict_field(pm, u).velocity + b * restrict_field(pm, v).velocity;
  CHECK((lhs - rhs).lpNorm<Eigen::Infinity>() <= 1e-10 * rhs.lpNorm<Eigen::Infinity>());
}

TEST_CASE("cell problems are independent of solve order") {
  const PerforatedMesh& pm = cells(2, 1.0);
  const Eigen::VectorXd u = interpolate_p2(*pm.full(), bump);
  const RestrictionResult all = restrict_field(pm, u);
  for (int k = pm.num_cells() - 1; k >= 0; --k) {
    const CellSolve c = solve_cell_problem(pm, k, u);
    CHECK(c.compatibility_mismatch <= 1e-8);
    const SubMesh& a = pm.annulus(k);
    for (int i = 0; i < a.mesh.num_quadratic_nodes(); ++i) {
      const int fnode = pm.fluid_node(a.node_to_parent(i, *pm.full()));
      REQUIRE(fnode >= 0);
      CHECK(all.velocity[2 * fnode] == c.solution.velocity[2 * i]);
      CHECK(all.velocity[2 * fnode + 1] == c.solution.velocity[2 * i + 1]);
    }
  }
}

TEST_CASE("hole divergence datum") {
  const PerforatedMesh& pm = cells(2, 1.0);
  // u = x is exact in P2 and div u = 2, so int_{T_k} div u = 2 |T_k|
  const Eigen::VectorXd u = interpolate_p2(*pm.full(), [](const Point& x) { return Vec2(x); });
  const auto c = hole_divergence_integrals(pm, u);
  REQUIRE(c.size() == 4);
  for (int k = 0; k < 4; ++k) CHECK(c[k] == doctest::Approx(2 * pm.hole_area(k)).epsilon(1e-13));
  const Eigen::VectorXd z = pm.zero_on_holes(u);
  for (double v : hole_divergence_integrals(pm, z)) CHECK(v == 0.0);
}

TEST_CASE("nonzero outer trace is rejected") {
  const PerforatedMesh& pm = cells(2, 1.0);
  const Eigen::VectorXd u = interpolate_p2(*pm.full(), [](const Point& x) { return Vec2(1.0 + x[0], 0.0); });
  CHECK_THROWS_AS(restrict_field(pm, u), PreconditionError);
}

TEST_CASE("restriction constant skips zero fields") {
  std::vector<const PerforatedMesh*> ms{&cells(2, 1.0), &cells(4, 1.0)};
  const PointVector zero = [](const Point&) { return Vec2::Zero(); };
  const RestrictionConstantTable t = measure_restriction_constant(ms, {zero, bump}, 2.0);
  REQUIRE(t.notices.size() == 2);  // once per mesh
  for (const auto& n : t.notices) CHECK(n.find("field 0") != std::string::npos);
  CHECK(t.samples.size() == 2);
  for (const auto& s : t.samples) {
    CHECK(s.field == 1);
    CHECK(s.exponent == doctest::Approx(-1.0));
    CHECK(s.constant == doctest::Approx(s.grad_restricted / (s.grad_u + std::pow(s.epsilon, -1.0) * s.u_norm)));
  }
  CHECK(t.extrapolated);
}

TEST_CASE("cutoff of the lifting operator") {
  const double eta = 0.1;
  CHECK(lift_cutoff(0.5 * eta, eta) == 1.0);
  CHECK(lift_cutoff(eta, eta) == 1.0);
  CHECK(lift_cutoff(2 * eta, eta) == 0.0);
  CHECK(lift_cutoff(3 * eta, eta) == 0.0);
  double worst = 0.0;
  for (int i = 0; i <= 1000; ++i) worst = std::max(worst, std::abs(lift_cutoff_derivative(eta * (1 + i / 1000.0), eta)));
  CHECK(worst <= 4.0 / eta);
  CHECK(worst == doctest::Approx(1.5 / eta));
}

TEST_CASE("lifting: zero field, boundary values and the constant field") {
  const HoleShape unit = HoleShape::disk(1.0);
  const LiftResult z = lift_zero_on_hole([](const Point&) { return Vec2::Zero(); }, 0.25, unit, 2.0);
  CHECK(z.velocity.lpNorm<Eigen::Infinity>() == 0.0);

  const PointVector u = [](const Point& x) { return Vec2(1.0 + x[0], x[1] * x[1]); };
  const LiftResult l = lift_zero_on_hole(u, 0.125, unit, 2.0);
  const TriMesh& m = *l.mesh;
  for (const auto& e : m.tagged_edges)
    for (int v : {e.a, e.b}) {
      const Vec2 val = l.velocity.segment<2>(2 * v);
      if (e.tag == edge_tag::hole(0)) CHECK(val.norm() == 0.0);
      if (e.tag == edge_tag::outer) CHECK((val - u(m.vertices[v])).norm() == 0.0);
    }

  // u = 1: ||grad L(u)||_2^2 = 2 pi int_eta^{2 eta} theta'(r)^2 r dr = 3.6 pi for every eta
  const double exact = std::sqrt(3.6 * pi);
  for (double eta : {0.25, 0.125, 0.0625}) {
    const LiftResult c = lift_zero_on_hole([](const Point&) { return Vec2(1.0, 0.0); }, eta, unit, 2.0);
    CHECK(c.grad_norm == doctest::Approx(exact).epsilon(0.03));
    CHECK(c.bound == doctest::Approx(std::sqrt(pi - pi * eta * eta)).epsilon(0.02));
  }
  CHECK_THROWS_AS(lift_zero_on_hole(u, 0.5, unit, 2.0), DomainError);
  CHECK_THROWS_AS(lift_zero_on_hole(u, 0.0, unit, 2.0), DomainError);
}

TEST_CASE("local Bogovskii operator on shrinking holes") {
  const HoleShape unit = HoleShape::disk(1.0);
  const ScalarField zero = ScalarField::zero();
  const LocalBogovskiiResult z = local_uniform_bogovskii(zero, 0.25, unit, 2.0);
  CHECK(z.solution.velocity.lpNorm<Eigen::Infinity>() == 0.0);

  // polynomial, so every quadrature rule in play integrates it exactly
  auto pair = [](const Point& x) { return x[0] * (1 - x.squaredNorm()) + 0.5 * x[1] * x[1]; };
  std::vector<double> ratios;
  for (double eta : {0.25, 0.125, 0.0625}) {
    const TriMesh m = unit_annulus_mesh(eta, unit);
    const ScalarField f = remove_mean(m, ScalarField::closed_form(pair), 10);
    const LocalBogovskiiResult r = local_uniform_bogovskii(f, eta, unit, 2.0);
    CHECK(r.solution.residual <= 1e-9);
    ratios.push_back(r.ratio);
  }
  const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
  CHECK(*hi / *lo <= 1.5);

  const ScalarField one = ScalarField::closed_form([](const Point&) { return 1.0; });
  CHECK_THROWS_AS(local_uniform_bogovskii(one, 0.25, unit, 2.0), CompatibilityError);
  CHECK_THROWS_AS(local_uniform_bogovskii(zero, 0.6, unit, 2.0), DomainError);
}

TEST_CASE("unit annulus consistency") {
  {
    const PerforatedMesh& pm = cells(8, 2.0);
    const Eigen::VectorXd u = interpolate_p2(*pm.full(), bump);
    const UnitAnnulusCheck c = unit_annulus_consistency(pm, 9, u);
    CHECK(c.eta == doctest::Approx(1.0 / 8));
    CHECK(c.discrepancy <= 1e-8);
    const Eigen::VectorXd z = Eigen::VectorXd::Zero(u.size());
    CHECK(unit_annulus_consistency(pm, 9, z).discrepancy == 0.0);
  }
  // alpha = 1: eta = 1 and the mapped annulus does not depend on eps
  const UnitAnnulusCheck a = unit_annulus_consistency(cells(2, 1.0), 0, interpolate_p2(*cells(2, 1.0).full(), bump));
  const UnitAnnulusCheck b = unit_annulus_consistency(cells(4, 1.0), 5, interpolate_p2(*cells(4, 1.0).full(), bump));
  CHECK(a.eta == 1.0);
  CHECK(b.eta == 1.0);
  CHECK(a.discrepancy <= 1e-8);
  CHECK(b.discrepancy <= 1e-8);
  REQUIRE(a.unit_mesh->num_vertices() == b.unit_mesh->num_vertices());
  auto sorted = [](const TriMesh& m) {
    std::vector<std::pair<long, long>> v;
    for (const Point& x : m.vertices) v.emplace_back(std::lround(x[0] * 1e9), std::lround(x[1] * 1e9));
    std::sort(v.begin(), v.end());
    return v;
  };
  CHECK(sorted(*a.unit_mesh) == sorted(*b.unit_mesh));
}

}  // TEST_SUITE
