#include <doctest.h>

#include "convergence.hpp"

#include "holelab/errors.hpp"
#include "holelab/mesher.hpp"
#include "holelab/scaling_experiments.hpp"
#include "holelab/stokes.hpp"

#include <cmath>
#include <sstream>

using namespace holelab;

namespace {

MeshPtr unit_square(int n) { return share(mesh_rectangle(0, 0, 1, 1, n, n)); }

MeshPtr hole_domain(double eps) {
  DomainSpec d;
  d.epsilon = eps;
  return share(mesh_single_hole(d, 0.5, 16));
}

}  // namespace

TEST_SUITE("stokes_fem") {

TEST_CASE("oracle sanity: the manufactured velocity is solenoidal and matches differences") {
  for (const Point x : {Point(0.3, 0.7), Point(0.5, 0.5), Point(0.11, 0.93)}) {
    const Mat2 g = manufactured::velocity_gradient(x);
    CHECK(std::abs(g.trace()) < 1e-15);
    const double h = 1e-6;
    for (int j = 0; j < 2; ++j) {
      Point xp = x, xm = x;
      xp[j] += h;
      xm[j] -= h;
      const Vec2 fd = (manufactured::velocity(xp) - manufactured::velocity(xm)) / (2 * h);
      CHECK((fd - g.col(j)).norm() < 1e-8);
    }
  }
  // psi_y(1/2, 1/2) = 0 by symmetry, so u(1/2, 1/2) = 0
  CHECK(manufactured::velocity(Point(0.5, 0.5)).norm() < 1e-16);
}

TEST_CASE("zero data gives a zero right-hand side and a zero solution") {
  const MeshPtr m = hole_domain(0.5);
  const auto op = StokesOperator::make(m);
  const SaddleSystem sys = assemble(op, StokesRhs::divergence_of(TensorField::zero()), nullptr, Dirichlet::zero(*m));
  CHECK(sys.rhs.lpNorm<Eigen::Infinity>() == 0.0);
  const StokesSolution s = solve(sys);
  CHECK(s.velocity.lpNorm<Eigen::Infinity>() == 0.0);
  CHECK(s.pressure.lpNorm<Eigen::Infinity>() == 0.0);
  const auto [v, p] = evaluate_at(s, Point(1.0, 0.3));
  CHECK(v.norm() == 0.0);
  CHECK(p == 0.0);
}

TEST_CASE("constant G produces a zero momentum load") {
  const MeshPtr m = hole_domain(0.5);
  Mat2 c;
  c << 1.5, -0.25, 2.0, 0.75;
  const TensorField G = TensorField::closed_form([c](const Point&) { return c; });
  const SaddleSystem sys = assemble(StokesOperator::make(m), StokesRhs::divergence_of(G), nullptr, Dirichlet::zero(*m));
  CHECK(sys.rhs.lpNorm<Eigen::Infinity>() < 1e-14);
  const StokesSolution s = solve(sys);
  CHECK(s.velocity.lpNorm<Eigen::Infinity>() < 1e-13);
}

TEST_CASE("incompatible divergence datum is rejected with its mismatch") {
  const TriMesh a = mesh_annulus(Point(0, 0), 1.0, HoleShape::disk(1.0), 0.25, 32);
  const MeshPtr m = share(a);
  const ScalarField one = ScalarField::closed_form([](const Point&) { return 1.0; });
  try {
    assemble(m, StokesRhs::zero(), &one, Dirichlet::zero(*m));
    FAIL("expected CompatibilityError");
  } catch (const CompatibilityError& e) {
    CHECK(e.mismatch() > 0.5);
  }
}

TEST_CASE("unknown boundary tags are a configuration error") {
  const MeshPtr m = hole_domain(0.5);
  Dirichlet d;
  d.set_function(edge_tag::outer, [](const Point&) { return Vec2::Zero(); });
  CHECK_THROWS_AS(assemble(m, StokesRhs::zero(), nullptr, d), ConfigError);
}

TEST_CASE("manufactured solution converges at second order") {
  std::vector<double> h, eu, ep;
  for (int n : {4, 8, 16, 32}) {
    const auto e = manufactured::errors_on(n);
    h.push_back(e.h);
    eu.push_back(e.grad_velocity);
    ep.push_back(e.pressure);
    CHECK(e.solver_residual <= 1e-9);
  }
  for (double r : manufactured::rates(h, eu)) CHECK(r >= 1.8);
  for (double r : manufactured::rates(h, ep)) CHECK(r >= 1.8);
}

TEST_CASE("manufactured solution at the center and its residual") {
  const MeshPtr m = unit_square(16);
  const StokesSolution s = solve_div_form(StokesOperator::make(m), manufactured::source_field());
  CHECK(s.residual <= 1e-9);
  const auto [v, p] = evaluate_at(s, Point(0.5, 0.5));
  CHECK(v.norm() < 1e-4);
  CHECK(std::abs(p - manufactured::pressure(Point(0.5, 0.5))) < 1e-3);
  CHECK_THROWS_AS(evaluate_at(s, Point(1.5, 0.5)), DomainError);
}

TEST_CASE("solution invariants: mean-zero pressure, boundary data, divergence") {
  const MeshPtr m = hole_domain(0.25);
  const TensorField G = default_source();
  const StokesSolution s = solve_div_form(StokesOperator::make(m), G);
  double mean = 0.0, area = 0.0;
  const auto pre = std::make_shared<const Eigen::VectorXd>(s.pressure);
  const ScalarField ph = p1_field(s.pressure_space, pre);
  for_each_quad_point(*m, 4, [&](const QuadPoint& q, double w) {
    mean += w * ph(q);
    area += w;
  });
  const double scale = lp_norm(*m, ph, 1.0).value;
  CHECK(std::abs(mean) <= 1e-10 * scale);
  CHECK(s.pressure_mean == doctest::Approx(mean / area).epsilon(1e-6).scale(1e-12));
  const auto op = StokesOperator::make(m);
  for (int node : op->boundary_nodes()) {
    CHECK(s.velocity[2 * node] == 0.0);
    CHECK(s.velocity[2 * node + 1] == 0.0);
  }
  CHECK(relative_divergence_residual(*m, *s.pressure_space, s.velocity) <= 1e-9);
}

TEST_CASE("discrete energy inequality for div-form sources") {
  for (double eps : {0.5, 0.125}) {
    const MeshPtr m = hole_domain(eps);
    for (const TensorField& G : {default_source(), channel_source(), manufactured::source_field()}) {
      const StokesSolution s = solve_div_form(StokesOperator::make(m), G);
      const double gv = lp_norm_gradient(*m, s.velocity, 2.0).value;
      const double gg = lp_norm(*m, G, 2.0).value;
      CHECK(gv <= gg + 1e-9);
    }
  }
}

TEST_CASE("energy audit counts solves and violations") {
  reset_energy_audit();
  set_energy_audit(true);
  const MeshPtr m = hole_domain(0.5);
  solve_div_form(StokesOperator::make(m), default_source());
  const EnergyAudit a = energy_audit();
  set_energy_audit(false);
  CHECK(a.solves == 1);
  CHECK(a.violations == 0);
  CHECK(a.worst_excess < 0.0);
}

TEST_CASE("prescribed divergence on the unit square") {
  const MeshPtr m = unit_square(8);
  const ScalarField f = ScalarField::closed_form([](const Point& x) { return x[0] - 0.5; });
  const StokesSolution w = solve_prescribed_divergence(StokesOperator::make(m), f, Dirichlet::zero(*m));
  const Eigen::VectorXd r = divergence_moments(*m, *w.pressure_space, w.velocity) - field_moments(*m, *w.pressure_space, f);
  CHECK(r.norm() <= 1e-9 * field_moments(*m, *w.pressure_space, f).norm());
  const double c = lp_norm_gradient(*m, w.velocity, 2.0).value / lp_norm(*m, f, 2.0).value;
  MESSAGE("measured right-inverse constant ||grad w|| / ||f|| = " << c);
  CHECK(c > 0.0);
  CHECK(std::isfinite(c));

  const StokesSolution z =
      solve_prescribed_divergence(StokesOperator::make(m), ScalarField::zero(), Dirichlet::zero(*m));
  CHECK(z.velocity.lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("compatible annulus problem with inhomogeneous outer data") {
  const MeshPtr m = share(mesh_annulus(Point(0, 0), 1.0, HoleShape::disk(1.0), 0.25, 32));
  // u = (x, 0) on the outer circle, 0 on the hole, constant divergence datum
  // equal to net flux / area. The flux of (x, 0) through the 32-gon is its area.
  const double flux = 16 * std::sin(2 * pi / 32);
  double area = 0.0;
  for (int t = 0; t < m->num_triangles(); ++t) area += m->triangle_area(t);
  Dirichlet d;
  d.set_function(edge_tag::outer, [](const Point& x) { return Vec2(x[0], 0.0); });
  d.set_function(edge_tag::hole(0), [](const Point&) { return Vec2::Zero(); });
  Eigen::VectorXd bv = Eigen::VectorXd::Zero(2 * m->num_quadratic_nodes());
  for (int i = 0; i < m->num_quadratic_nodes(); ++i)
    if (m->node(i).norm() > 0.5) bv[2 * i] = m->node(i)[0];
  const double discrete_flux = boundary_flux(*m, bv);
  CHECK(discrete_flux == doctest::Approx(flux).epsilon(1e-12));
  const double c = discrete_flux / area;
  const ScalarField f = ScalarField::closed_form([c](const Point&) { return c; });
  const StokesSolution s = solve_prescribed_divergence(StokesOperator::make(m), f, d);
  CHECK(s.residual <= 1e-9);
  const ScalarField bad = ScalarField::closed_form([c](const Point&) { return 1.5 * c; });
  CHECK_THROWS_AS(solve_prescribed_divergence(StokesOperator::make(m), bad, d), CompatibilityError);
}

TEST_CASE("weak Laplacian right-hand side reproduces a P2 field") {
  // -Lap w + grad q = -Lap u, div w = div u, w = u on the boundary: w = u, q = 0.
  const MeshPtr m = unit_square(6);
  const auto u = std::make_shared<const Eigen::VectorXd>(
      interpolate_p2(*m, [](const Point& x) { return Vec2(std::sin(x[0]) * x[1], x[0] * x[0] - x[1]); }));
  StokesRhs rhs;
  rhs.laplacian_of = u;
  const ScalarField div = p2_divergence_field(m, u);
  Dirichlet d;
  d.set(edge_tag::outer, [u](int node, const Point&) { return Vec2((*u)[2 * node], (*u)[2 * node + 1]); });
  const StokesSolution s = solve(assemble(m, rhs, &div, d));
  CHECK((s.velocity - *u).lpNorm<Eigen::Infinity>() < 1e-12);
  CHECK(s.pressure.lpNorm<Eigen::Infinity>() < 1e-10);
}

TEST_CASE("repeated solves are bitwise identical") {
  const MeshPtr m = hole_domain(0.25);
  const StokesSolution a = solve_div_form(StokesOperator::make(m), default_source());
  const StokesSolution b = solve_div_form(StokesOperator::make(m), default_source());
  CHECK(a.velocity == b.velocity);
  CHECK(a.pressure == b.pressure);
}

TEST_CASE("solution dump round trip and checksum guard") {
  const MeshPtr m = hole_domain(0.5);
  const StokesSolution s = solve_div_form(StokesOperator::make(m), default_source());
  std::stringstream ss;
  write_solution(ss, s);
  std::string header;
  std::getline(ss, header);
  CHECK(header.rfind("stokes v1 ", 0) == 0);
  ss.seekg(0);
  const StokesSolution r = read_solution(ss, m, s.pressure_space);
  CHECK(r.velocity == s.velocity);
  CHECK(r.pressure == s.pressure);
  ss.clear();
  ss.seekg(0);
  CHECK_THROWS(read_solution(ss, hole_domain(0.25), s.pressure_space));
}

}  // TEST_SUITE
