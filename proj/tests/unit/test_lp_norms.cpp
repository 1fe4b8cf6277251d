#include <doctest.h>

#include "manufactured.hpp"

#include "holelab/errors.hpp"
#include "holelab/lp_norms.hpp"
#include "holelab/mesher.hpp"
#include "holelab/scaling_experiments.hpp"

#include <cmath>
#include <random>

using namespace holelab;

namespace {

const TriMesh& unit_square() {
  static const TriMesh m = mesh_rectangle(0, 0, 1, 1, 6, 6);
  return m;
}

}  // namespace

TEST_SUITE("lp_norms") {

TEST_CASE("conjugate exponents") {
  CHECK(conjugate(2.0) == 2.0);
  CHECK(conjugate(4.0) == doctest::Approx(4.0 / 3));
  CHECK(conjugate(1.5) == doctest::Approx(3.0));
  CHECK_THROWS_AS(conjugate(1.0), DomainError);
  for (double p : {1.1, 1.5, 2.0, 3.0, 7.5}) CHECK(1 / p + 1 / conjugate(p) == doctest::Approx(1.0));
}

TEST_CASE("Sobolev exponents") {
  CHECK(sobolev_star(2.0, 3) == doctest::Approx(6.0));
  CHECK(sobolev_star(1.5, 3) == doctest::Approx(3.0));
  CHECK_THROWS_AS(sobolev_star(2.0, 2), DomainError);
  CHECK_THROWS_AS(sobolev_star(1.0, 3), DomainError);
}

TEST_CASE("norms of simple fields on the unit square") {
  const TriMesh& m = unit_square();
  const ScalarField c = ScalarField::closed_form([](const Point&) { return -2.5; });
  for (double p : {1.5, 2.0, 4.0}) CHECK(lp_norm(m, c, p).value == doctest::Approx(2.5).epsilon(1e-14));
  const ScalarField x1 = ScalarField::closed_form([](const Point& x) { return x[0]; });
  CHECK(lp_norm(m, x1, 2.0).value == doctest::Approx(1 / std::sqrt(3.0)).epsilon(1e-14));
  // int_0^1 x^4 = 1/5
  CHECK(lp_norm(m, x1, 4.0).value == doctest::Approx(std::pow(0.2, 0.25)).epsilon(1e-14));
  CHECK(lp_norm(m, ScalarField::zero(), 3.0).value == 0.0);
  const VectorField v = VectorField::closed_form([](const Point& x) { return Vec2(x[0], x[1]); });
  CHECK(lp_norm(m, v, 2.0).value == doctest::Approx(std::sqrt(2.0 / 3)).epsilon(1e-14));
  const TensorField id = TensorField::closed_form([](const Point&) { return Mat2::Identity(); });
  CHECK(lp_norm(m, id, 3.0).value == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("non-polynomial integrands report a quadrature error estimate") {
  const TriMesh& m = unit_square();
  const ScalarField f = ScalarField::closed_form([](const Point& x) { return std::sin(3 * x[0]) - x[1]; });
  const NormValue n = lp_norm(m, f, 4.0 / 3);
  CHECK(n.estimated);
  CHECK(n.error_estimate >= 0.0);
  CHECK(n.error_estimate < 1e-3 * n.value);
}

TEST_CASE("masked norms never exceed the full norm") {
  const TriMesh& m = unit_square();
  const ScalarField f = ScalarField::closed_form([](const Point& x) { return std::cos(5 * x[0] * x[1]); });
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    TriangleMask mask(m.num_triangles());
    for (auto& c : mask) c = static_cast<char>(rng() % 2);
    for (double p : {1.5, 2.0, 5.0}) CHECK(lp_norm(m, f, p, 6, &mask).value <= lp_norm(m, f, p).value);
  }
}

TEST_CASE("norms are nondecreasing in p on a unit-area domain") {
  const TriMesh& m = unit_square();
  const ScalarField fs[] = {
      ScalarField::closed_form([](const Point& x) { return x[0] * x[0] - x[1]; }),
      ScalarField::closed_form([](const Point& x) { return std::exp(x[0]) * std::sin(7 * x[1]); }),
      ScalarField::closed_form([](const Point& x) { return 0.5 + x[0] * x[1]; }),
  };
  for (const auto& f : fs) {
    double last = 0.0;
    for (double p = 1.1; p <= 8.0; p *= 1.3) {
      const double n = lp_norm(m, f, p).value;
      CHECK(n >= last * (1 - 1e-13));
      last = n;
    }
  }
}

TEST_CASE("scaling law under mesh rescaling") {
  DomainSpec d;
  d.epsilon = 0.25;
  const TriMesh m = mesh_single_hole(d, 0.5, 16);
  const double s = 3.0;
  const TriMesh ms = rescale_mesh(m, s);
  const ScalarField f = ScalarField::closed_form([](const Point& x) { return std::sin(x[0]) + x[1] * x[1]; });
  const ScalarField fs = ScalarField::closed_form([s](const Point& y) {
    const Point x = y / s;
    return std::sin(x[0]) + x[1] * x[1];
  });
  for (double p : {4.0 / 3, 2.0, 4.0}) {
    const double a = lp_norm(m, f, p).value, b = lp_norm(ms, fs, p).value;
    CHECK(std::abs(b - std::pow(s, 2 / p) * a) <= 1e-10 * b);
  }
}

TEST_CASE("norm report and estimate ratio") {
  DomainSpec d;
  d.epsilon = 0.25;
  const MeshPtr m = share(mesh_single_hole(d, 0.5, 16));
  const TensorField G = default_source();
  const StokesSolution s = solve_div_form(StokesOperator::make(m), G);
  const NormReport r = norm_report(s, G, 2.0);
  CHECK(r.grad_velocity_lp <= r.source_lp + 1e-9);
  CHECK(r.pressure_lp >= 0.0);
  CHECK(!r.flagged);
  CHECK(estimate_ratio(s, G, 2.0) == doctest::Approx((r.grad_velocity_lp + r.pressure_lp) / r.source_lp));

  Mat2 c;
  c << 1, 2, 3, 4;
  const TensorField C = TensorField::closed_form([c](const Point&) { return c; });
  const StokesSolution z = solve_div_form(StokesOperator::make(m), C);
  CHECK(estimate_ratio(z, C, 2.0) < 1e-12);
  CHECK_THROWS_AS(estimate_ratio(z, TensorField::zero(), 2.0), DomainError);
}

TEST_CASE("estimate ratio agrees with the manufactured oracle") {
  const MeshPtr m = share(mesh_rectangle(0, 0, 1, 1, 16, 16));
  const TensorField G = manufactured::source_field();
  const StokesSolution s = solve_div_form(StokesOperator::make(m), G);
  const TensorField gu = TensorField::closed_form(manufactured::velocity_gradient);
  const ScalarField pe = ScalarField::closed_form(manufactured::pressure);
  const double exact = (lp_norm(*m, gu, 2.0, 10).value + lp_norm(*m, pe, 2.0, 10).value) / lp_norm(*m, G, 2.0, 10).value;
  CHECK(estimate_ratio(s, G, 2.0) == doctest::Approx(exact).epsilon(0.01));
}

}  // TEST_SUITE
