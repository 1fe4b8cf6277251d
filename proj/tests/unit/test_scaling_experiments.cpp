#include <doctest.h>

#include "holelab/errors.hpp"
#include "holelab/mesher.hpp"
#include "holelab/scaling_experiments.hpp"

#include <cmath>

using namespace holelab;

namespace {

DomainSpec family() { return DomainSpec{}; }

SweepOptions coarse() {
  SweepOptions o;
  o.n_hole = 16;
  o.h_far = 0.5;
  o.refinement_check = false;
  return o;
}

TensorField constant_source() {
  return TensorField::closed_form([](const Point&) { return Mat2::Identity() * 2.0; }, "constant");
}

/// The dipole moved off the origin; its even part is nonzero.
TensorField shifted_dipole() {
  const TensorField G = default_source();
  return TensorField::closed_form([G](const Point& x) { return G.at(x - Point(0.2, 0.1)); }, "shifted dipole");
}

}  // namespace

TEST_SUITE("scaling_experiments") {

TEST_CASE("growth fit classifies synthetic sequences") {
  const std::vector<double> eps{1.0 / 2, 1.0 / 4, 1.0 / 8, 1.0 / 16, 1.0 / 32};
  std::vector<double> grow, flat, noisy;
  for (double e : eps) {
    grow.push_back(std::pow(1 / e, 0.3));
    flat.push_back(1.0 + 0.01 * std::log(1 / e));
  }
  noisy = {1.0, 1.3, 0.9, 1.4, 1.0};
  const GrowthFit g = fit_growth(eps, grow);
  CHECK(g.verdict == Trend::growing);
  CHECK(g.slope == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(g.increasing);
  const GrowthFit f = fit_growth(eps, flat);
  CHECK(f.verdict == Trend::bounded);
  CHECK(f.band <= 1.2);
  CHECK(fit_growth(eps, noisy).verdict == Trend::inconclusive);
  CHECK_THROWS_AS(fit_growth(eps, {1.0, 2.0}), PreconditionError);
}

TEST_CASE("eps lists are validated") {
  CHECK_THROWS_AS(validate_eps_list({}), ConfigError);
  CHECK_THROWS_AS(validate_eps_list({0.25, 0.5}), ConfigError);
  CHECK_THROWS_AS(validate_eps_list({1.5}), ConfigError);
  CHECK_NOTHROW(validate_eps_list({0.5, 0.25}));
  CHECK_THROWS_AS(run_uniform_sweep(family(), default_source(), 2.0, {}, coarse()), ConfigError);
}

TEST_CASE("default source is a solenoidal dipole supported in B_3/2") {
  const TensorField G = default_source();
  // div G = (d2 psi, -d1 psi) is divergence free: check by central differences
  auto divG = [&](const Point& x) {
    const double h = 1e-5;
    Vec2 d = Vec2::Zero();
    for (int j = 0; j < 2; ++j) {
      Point xp = x, xm = x;
      xp[j] += h;
      xm[j] -= h;
      d += (G.at(xp) - G.at(xm)).col(j) / (2 * h);
    }
    return d;
  };
  for (const Point x : {Point(0.1, 0.2), Point(-0.7, 0.4), Point(0.3, -0.9)}) {
    const double h = 1e-4;
    const double div = (divG(x + Point(h, 0))[0] - divG(x - Point(h, 0))[0] + divG(x + Point(0, h))[1] -
                        divG(x - Point(0, h))[1]) /
                       (2 * h);
    CHECK(std::abs(div) < 1e-4);
  }
  CHECK(G.at(Point(1.6, 0.0)).norm() == 0.0);
  CHECK(G.at(Point(0.0, 1.5)).norm() == 0.0);
}

TEST_CASE("constant source gives zero ratios and a bounded verdict") {
  const SweepResult r = run_uniform_sweep(family(), constant_source(), 2.0, {0.5, 0.25, 0.125, 0.0625}, coarse());
  REQUIRE(r.records.size() == 4);
  for (const auto& rec : r.records) CHECK(rec.ratio < 1e-12);
  CHECK(r.fit.verdict == Trend::bounded);
}

TEST_CASE("p = 2 sweeps obey the energy inequality at every point") {
  const SweepResult r = run_uniform_sweep(family(), default_source(), 2.0, {0.5, 0.25, 0.125}, coarse());
  CHECK(r.failures.empty());
  for (const auto& rec : r.records) {
    CHECK(rec.norms.grad_velocity_lp <= rec.norms.source_lp * (1 + 1e-9));
    CHECK(std::isfinite(rec.ratio));
    CHECK(rec.dofs > 0);
  }
  for (std::size_t i = 1; i < r.records.size(); ++i) CHECK(r.records[i].epsilon < r.records[i - 1].epsilon);
}

TEST_CASE("center check accepts the dipole and rejects degenerate sources") {
  DomainSpec omega = family();
  const CenterCheck c = verify_nondegenerate_center(omega, default_source());
  CHECK(c.magnitude > 10 * c.error_bar);
  CHECK_THROWS_AS(verify_nondegenerate_center(omega, constant_source()), DegenerateSource);
  CHECK_THROWS_AS(verify_nondegenerate_center(omega, pressure_only_source()), DegenerateSource);
  // symmetrized source: the solution is odd, so v(0) = 0
  const TensorField even = even_part(shifted_dipole());
  CHECK(lp_norm(mesh_rectangle(-2, -2, 2, 2, 8, 8), even, 2.0).value > 0.1);
  CHECK_NOTHROW(verify_nondegenerate_center(omega, shifted_dipole()));
  CHECK_THROWS_AS(verify_nondegenerate_center(omega, even), DegenerateSource);
}

TEST_CASE("blow-up sweep preconditions") {
  CHECK_THROWS_AS(run_blowup_sweep(family(), default_source(), 2.0, {0.5, 0.25}, coarse()), PreconditionError);
  CHECK_THROWS_AS(run_blowup_sweep(family(), constant_source(), 4.0, {0.5, 0.25}, coarse()), DegenerateSource);
}

TEST_CASE("dual source normalization and pairing") {
  DomainSpec d = family();
  d.epsilon = 0.25;
  const MeshPtr m = share(mesh_single_hole(d, 0.5, 16));
  const StokesSolution v = solve_div_form(StokesOperator::make(m), default_source());
  for (double p : {4.0 / 3, 1.5, 2.0}) {
    const DualSource h = construct_dual_source(v, p);
    CHECK(std::abs(h.norm - 1.0) <= 1e-6);
    CHECK(std::abs(h.pairing - h.gradient_norm) <= 1e-6 * h.gradient_norm);
    CHECK(h.H.table_degree() == h.degree);
  }
  // p = 2: H is the normalized gradient
  const DualSource h2 = construct_dual_source(v, 2.0);
  const auto coef = std::make_shared<const Eigen::VectorXd>(v.velocity);
  const TensorField g = p2_gradient_field(m, coef);
  const double n = lp_norm_gradient(*m, v.velocity, 2.0).value;
  for_each_quad_point(*m, h2.degree, [&](const QuadPoint& q, double) {
    CHECK((h2.H(q) - g(q) / n).norm() <= 1e-12 * (1 + g(q).norm() / n));
  });
  StokesSolution z = v;
  z.velocity.setZero();
  CHECK_THROWS_AS(construct_dual_source(z, 4.0 / 3), DomainError);
}

TEST_CASE("dual blow-up sweep preconditions and lower bound") {
  CHECK_THROWS_AS(run_dual_blowup_sweep(family(), default_source(), 2.0, {0.5, 0.25}, coarse()), PreconditionError);
  const DualSweepResult r = run_dual_blowup_sweep(family(), default_source(), 4.0 / 3, {0.5, 0.25, 0.125}, coarse());
  REQUIRE(r.points.size() == 3);
  for (const auto& pt : r.points) {
    CHECK(std::abs(pt.h_norm - 1.0) <= 1e-6);
    CHECK(pt.duality_error <= 1e-6);
    CHECK(pt.grad_w >= 0.95 * pt.lower_bound);
  }
}

TEST_CASE("rescaling consistency") {
  for (double p : {2.0, 4.0}) {
    const RescalingResult r = rescaling_consistency(family(), default_source(), p, 0.25, coarse());
    CHECK(r.discrepancy <= 1e-8);
    CHECK(r.gradient_law_error <= 1e-8);
  }
  const RescalingResult one = rescaling_consistency(family(), default_source(), 2.0, 1.0 / 2, coarse());
  CHECK(one.discrepancy <= 1e-8);
}

TEST_CASE("rescaling at eps = 1 is the identity") {
  DomainSpec d = family();
  d.hole = HoleShape::disk(0.25);
  const RescalingResult r = rescaling_consistency(d, default_source(), 2.0, 1.0, coarse());
  CHECK(r.discrepancy == 0.0);
}

TEST_CASE("enlarging-domain sweep") {
  BumpForce g;
  const SweepResult r = run_enlarging_domain_sweep(family(), g, 2.0, {0.5, 0.25, 0.125, 0.0625}, coarse());
  CHECK(r.failures.empty());
  CHECK(r.fit.band <= 1.2);
  BumpForce zero;
  zero.amplitude = 0.0;
  const SweepResult z = run_enlarging_domain_sweep(family(), zero, 2.0, {0.5, 0.25}, coarse());
  for (const auto& rec : z.records) {
    CHECK(rec.norms.grad_velocity_lp == 0.0);
    CHECK(rec.norms.pressure_lp == 0.0);
  }
  BumpForce wide;
  wide.radius = 1.5;
  CHECK_THROWS_AS(run_enlarging_domain_sweep(family(), wide, 2.0, {0.5}, coarse()), ConfigError);
}

TEST_CASE("bump force has zero net force") {
  const VectorField f = BumpForce{}.field();
  const TriMesh m = mesh_rectangle(-1, -1, 1, 1, 16, 16);
  Vec2 total = Vec2::Zero();
  for_each_quad_point(m, 10, [&](const QuadPoint& q, double w) { total += w * f(q); });
  CHECK(total.norm() < 1e-14);
}

TEST_CASE("sweeps are reproducible") {
  const SweepResult a = run_uniform_sweep(family(), default_source(), 4.0, {0.5, 0.25}, coarse());
  const SweepResult b = run_uniform_sweep(family(), default_source(), 4.0, {0.5, 0.25}, coarse());
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) CHECK(a.records[i].ratio == b.records[i].ratio);
}

}  // TEST_SUITE
