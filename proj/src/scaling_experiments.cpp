#include "holelab/scaling_experiments.hpp"

#include "holelab/errors.hpp"
#include "holelab/mesher.hpp"
#include "holelab/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

namespace holelab {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string eps_label(double eps) {
  std::ostringstream os;
  os << "eps=" << eps;
  return os.str();
}

/// Runs point(i) for every eps concurrently; failures become messages.
template <class Point>
void run_points(const std::vector<double>& eps, std::vector<std::optional<SweepRecord>>& out,
                std::vector<std::string>& failures, Point&& point) {
  const int n = static_cast<int>(eps.size());
  out.assign(n, std::nullopt);
  std::vector<std::string> errors(n);
  parallel_chunks(n, n, [&](int, int b, int e) {
    for (int i = b; i < e; ++i) {
      try {
        out[i] = point(i);
      } catch (const Error& ex) {
        errors[i] = eps_label(eps[i]) + ": " + ex.what();
      }
    }
  });
  for (const auto& e : errors)
    if (!e.empty()) failures.push_back(e);
}

SweepResult collect(std::vector<std::optional<SweepRecord>>& points, std::vector<std::string> failures) {
  SweepResult r;
  r.failures = std::move(failures);
  for (auto& p : points)
    if (p) r.records.push_back(*p);
  std::vector<double> e, v;
  for (const auto& rec : r.records) {
    e.push_back(rec.epsilon);
    v.push_back(rec.ratio);
  }
  r.fit = fit_growth(e, v);
  return r;
}

SweepRecord div_form_point(const MeshPtr& mesh, const TensorField& G, double p, double eps, int degree) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto op = StokesOperator::make(mesh);
  const StokesSolution s = solve_div_form(op, G);
  SweepRecord rec;
  rec.epsilon = eps;
  rec.p = p;
  rec.norms = norm_report(s, G, p, degree);
  rec.ratio = rec.norms.source_lp > 0 ? estimate_ratio(rec.norms) : 0.0;
  rec.dofs = s.dofs();
  rec.seconds = seconds_since(t0);
  return rec;
}

void refine_smallest(SweepResult& r, const SweepOptions& options,
                     const std::function<double(const SweepOptions&, double)>& value) {
  if (!options.refinement_check || r.records.empty()) return;
  const SweepRecord& last = r.records.back();
  SweepOptions fine = options;
  fine.n_hole *= 2;
  fine.h_far *= 0.5;
  try {
    r.refined_value = value(fine, last.epsilon);
    const double base = value(options, last.epsilon);
    r.refinement_change = base != 0.0 ? std::abs(r.refined_value - base) / std::abs(base) : 0.0;
  } catch (const Error& ex) {
    r.failures.push_back("refinement at " + eps_label(last.epsilon) + ": " + ex.what());
  }
}

void require_source(const TensorField& G) {
  if (!G.valid()) throw ConfigError("sweep needs a source field");
}

}  // namespace

TensorField default_source() {
  return TensorField::closed_form(
      [](const Point& x) {
        const double s = 1.0 - x.squaredNorm() / 2.25;
        Mat2 g = Mat2::Zero();
        if (s <= 0.0) return g;
        const double psi = x.y() * s * s * s;
        g(0, 1) = psi;
        g(1, 0) = -psi;
        return g;
      },
      "dipole");
}

TensorField channel_source() {
  return TensorField::closed_form(
      [](const Point& x) {
        Mat2 g = Mat2::Zero();
        g(0, 1) = x.y() - x.y() * x.y() * x.y() / 12.0;
        return g;
      },
      "channel");
}

TensorField pressure_only_source() {
  return TensorField::closed_form([](const Point& x) { return Mat2(x.x() * Mat2::Identity()); }, "pressure-only");
}

TensorField even_part(const TensorField& G) {
  return TensorField::closed_form([G](const Point& x) { return Mat2(0.5 * (G.at(x) + G.at(-x))); },
                                  "even part of " + G.label());
}

std::string to_string(Trend t) {
  switch (t) {
    case Trend::bounded: return "bounded";
    case Trend::growing: return "growing";
    case Trend::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

GrowthFit fit_growth(const std::vector<double>& eps, const std::vector<double>& values, double band_threshold) {
  if (eps.size() != values.size()) throw PreconditionError("fit_growth needs matching eps and value lists");
  GrowthFit fit;
  fit.band_threshold = band_threshold;
  const int n = static_cast<int>(values.size());
  if (n < fit.window) return fit;
  const int b = n - fit.window;
  double lo = values[b], hi = values[b];
  fit.increasing = true;
  bool positive = values[b] > 0;
  for (int i = b + 1; i < n; ++i) {
    lo = std::min(lo, values[i]);
    hi = std::max(hi, values[i]);
    if (!(values[i] > values[i - 1])) fit.increasing = false;
    if (!(values[i] > 0)) positive = false;
  }
  if (positive) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = b; i < n; ++i) {
      const double x = std::log(1.0 / eps[i]), y = std::log(values[i]);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double w = fit.window;
    const double den = w * sxx - sx * sx;
    fit.slope = den > 0 ? (w * sxy - sx * sy) / den : 0.0;
    const double icept = (sy - fit.slope * sx) / w;
    double ss = 0;
    for (int i = b; i < n; ++i) {
      const double r = std::log(values[i]) - icept - fit.slope * std::log(1.0 / eps[i]);
      ss += r * r;
    }
    fit.residual = std::sqrt(ss / w);
    fit.band = hi / lo;
  } else {
    fit.band = hi == 0.0 && lo == 0.0 ? 1.0 : INFINITY;
  }
  if (fit.increasing && fit.slope > fit.growth_threshold)
    fit.verdict = Trend::growing;
  else if (fit.band <= band_threshold)
    fit.verdict = Trend::bounded;
  return fit;
}

void validate_eps_list(const std::vector<double>& eps) {
  if (eps.empty()) throw ConfigError("eps list is empty");
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0.0 && eps[i] <= 1.0)) throw ConfigError("eps values must lie in (0, 1]");
    if (i > 0 && !(eps[i] < eps[i - 1])) throw ConfigError("eps list must be strictly decreasing");
  }
}

TriMesh sweep_mesh(const DomainSpec& family, double eps, const SweepOptions& options) {
  DomainSpec spec = family;
  spec.epsilon = eps;
  spec.validate();
  return mesh_single_hole(spec, options.h_far, options.n_hole);
}

SweepResult run_uniform_sweep(const DomainSpec& family, const TensorField& G, double p, const std::vector<double>& eps,
                              const SweepOptions& options) {
  validate_eps_list(eps);
  require_source(G);
  conjugate(p);
  std::vector<std::optional<SweepRecord>> points;
  std::vector<std::string> failures;
  run_points(eps, points, failures, [&](int i) {
    return div_form_point(share(sweep_mesh(family, eps[i], options)), G, p, eps[i], options.quad_degree);
  });
  SweepResult r = collect(points, std::move(failures));
  refine_smallest(r, options, [&](const SweepOptions& o, double e) {
    return div_form_point(share(sweep_mesh(family, e, o)), G, p, e, o.quad_degree).ratio;
  });
  return r;
}

CenterCheck verify_nondegenerate_center(const DomainSpec& omega, const TensorField& G, double h_far, int n_core) {
  require_source(G);
  auto center_value = [&](double h, int n) {
    const auto mesh = share(mesh_without_hole(omega, h, n));
    return evaluate_at(solve_div_form(StokesOperator::make(mesh), G), Point::Zero()).first;
  };
  const Vec2 coarse = center_value(h_far, n_core);
  CenterCheck c;
  c.value = center_value(0.5 * h_far, 2 * n_core);
  c.magnitude = c.value.norm();
  c.error_bar = (c.value - coarse).norm();
  const double g = lp_norm(mesh_without_hole(omega, h_far, n_core), G, 2.0).value;
  if (!(c.magnitude > 10.0 * c.error_bar) || !(c.magnitude > 1e-10 * g)) {
    std::ostringstream os;
    os << "degenerate source '" << G.label() << "': |v(0)| = " << c.magnitude << " with refinement error bar "
       << c.error_bar;
    throw DegenerateSource(os.str());
  }
  return c;
}

SweepResult run_blowup_sweep(const DomainSpec& family, const TensorField& G, double p, const std::vector<double>& eps,
                             const SweepOptions& options) {
  validate_eps_list(eps);
  require_source(G);
  if (!(p > family.dimension)) throw PreconditionError("blow-up sweep needs p > d");
  verify_nondegenerate_center(family, G);
  return run_uniform_sweep(family, G, p, eps, options);
}

DualSource construct_dual_source(const StokesSolution& v, double p, int degree) {
  const double pp = conjugate(p);
  const TriMesh& mesh = *v.mesh;
  const QuadRule& rule = triangle_rule(degree);
  const int nq = rule.size();
  std::vector<Mat2> grads(static_cast<std::size_t>(mesh.num_triangles()) * nq);
  std::vector<double> weights(grads.size());
  for_each_quad_point(mesh, degree, [&](const QuadPoint& q, double w) {
    const std::size_t i = static_cast<std::size_t>(q.triangle) * nq + q.index;
    grads[i] = p2_gradient(mesh, v.velocity, q.triangle, q.bary);
    weights[i] = w;
  });
  double sum = 0.0;
  for (std::size_t i = 0; i < grads.size(); ++i) sum += weights[i] * std::pow(grads[i].norm(), pp);
  DualSource out;
  out.degree = degree;
  out.gradient_norm = std::pow(sum, 1.0 / pp);
  if (!(out.gradient_norm > 0.0)) throw DomainError("dual source undefined: grad v = 0");
  const double scale = std::pow(out.gradient_norm, pp / p);
  std::vector<Mat2> H(grads.size());
  double hp = 0.0, pairing = 0.0;
  for (std::size_t i = 0; i < grads.size(); ++i) {
    const double a = grads[i].norm();
    H[i] = a > 0.0 ? Mat2(std::pow(a, pp - 2.0) * grads[i] / scale) : Mat2::Zero();
    hp += weights[i] * std::pow(H[i].norm(), p);
    pairing += weights[i] * (H[i].array() * grads[i].array()).sum();
  }
  out.norm = std::pow(hp, 1.0 / p);
  out.pairing = pairing;
  out.H = TensorField::table(mesh, degree, std::move(H), "dual source");
  return out;
}

DualSweepResult run_dual_blowup_sweep(const DomainSpec& family, const TensorField& G, double p,
                                      const std::vector<double>& eps, const SweepOptions& options) {
  validate_eps_list(eps);
  require_source(G);
  const double d = family.dimension;
  const double pp = conjugate(p);
  if (!(p < d / (d - 1.0))) throw PreconditionError("dual blow-up sweep needs p < d'");
  verify_nondegenerate_center(family, G);
  const int degree = options.quad_degree;

  auto point = [&](const SweepOptions& o, double e, DualPoint* dp) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto op = StokesOperator::make(share(sweep_mesh(family, e, o)));
    const StokesSolution v = solve_div_form(op, G);
    const DualSource ds = construct_dual_source(v, p, degree);
    const StokesSolution w = solve_div_form(op, ds.H);
    SweepRecord rec;
    rec.epsilon = e;
    rec.p = p;
    rec.norms = norm_report(w, ds.H, p, degree);
    rec.ratio = estimate_ratio(rec.norms);
    rec.dofs = w.dofs();
    rec.seconds = seconds_since(t0);
    if (dp) {
      dp->epsilon = e;
      dp->h_norm = ds.norm;
      dp->duality_error = std::abs(ds.pairing - ds.gradient_norm) / ds.gradient_norm;
      dp->grad_w = rec.norms.grad_velocity_lp;
      dp->lower_bound = ds.gradient_norm / lp_norm(op->mesh(), G, pp, degree).value;
    }
    return rec;
  };

  const int n = static_cast<int>(eps.size());
  std::vector<DualPoint> dps(n);
  std::vector<std::optional<SweepRecord>> points;
  std::vector<std::string> failures;
  run_points(eps, points, failures, [&](int i) { return point(options, eps[i], &dps[i]); });
  DualSweepResult out;
  out.sweep = collect(points, std::move(failures));
  std::vector<double> e, g;
  for (int i = 0; i < n; ++i)
    if (points[i]) {
      out.points.push_back(dps[i]);
      e.push_back(eps[i]);
      g.push_back(dps[i].grad_w);
    }
  out.sweep.fit = fit_growth(e, g);
  refine_smallest(out.sweep, options,
                  [&](const SweepOptions& o, double ee) { return point(o, ee, nullptr).norms.grad_velocity_lp; });
  return out;
}

RescalingResult rescaling_consistency(const DomainSpec& spec, const TensorField& G, double p, double eps,
                                      const SweepOptions& options) {
  require_source(G);
  if (!G.pointwise()) throw PreconditionError("rescaling needs a closed-form source");
  const TriMesh original = sweep_mesh(spec, eps, options);
  const MeshPtr m0 = share(original);
  const MeshPtr m1 = share(rescale_mesh(original, 1.0 / eps));
  const TensorField G1 = TensorField::closed_form([G, eps](const Point& y) { return Mat2(eps * G.at(eps * y)); },
                                                  "rescaled " + G.label());
  const StokesSolution s0 = solve_div_form(StokesOperator::make(m0), G);
  const StokesSolution s1 = solve_div_form(StokesOperator::make(m1), G1);
  const NormReport r0 = norm_report(s0, G, p, options.quad_degree);
  const NormReport r1 = norm_report(s1, G1, p, options.quad_degree);
  RescalingResult r;
  r.ratio_original = estimate_ratio(r0);
  r.ratio_rescaled = estimate_ratio(r1);
  r.discrepancy = r.ratio_original > 0 ? std::abs(r.ratio_original - r.ratio_rescaled) / r.ratio_original : 0.0;
  const double expected = std::pow(eps, 1.0 - spec.dimension / p) * r0.grad_velocity_lp;
  r.gradient_law_error = expected > 0 ? std::abs(r1.grad_velocity_lp - expected) / expected : 0.0;
  r.original = r0;
  r.dofs = s0.dofs();
  return r;
}

VectorField BumpForce::field() const {
  const double r2 = radius * radius, a = amplitude;
  return VectorField::closed_form(
      [r2, a](const Point& x) {
        const double s = 1.0 - x.squaredNorm() / r2;
        if (s <= 0.0) return Vec2(Vec2::Zero());
        return Vec2(a * s * s * s * Vec2(-x.y(), x.x()));
      },
      "swirl bump");
}

SweepResult run_enlarging_domain_sweep(const DomainSpec& omega, const BumpForce& g, double p,
                                       const std::vector<double>& eps, const SweepOptions& options) {
  validate_eps_list(eps);
  conjugate(p);
  if (!(g.radius > 0.0) || g.radius > 1.0) throw ConfigError("bump support radius must lie in (0, 1]");
  const VectorField f = g.field();
  auto point = [&](const SweepOptions& o, double e) {
    const auto t0 = std::chrono::steady_clock::now();
    DomainSpec big = omega;
    big.half_size = omega.half_size / e;
    const auto mesh = share(mesh_without_hole(big, o.h_far / e, o.n_hole, 0.25));
    StokesRhs rhs;
    rhs.body_force = f;
    const StokesSolution s = solve(assemble(StokesOperator::make(mesh), rhs, nullptr, Dirichlet::zero(*mesh)));
    SweepRecord rec;
    rec.epsilon = e;
    rec.p = p;
    const Eigen::VectorXd pr = s.pressure.array() - s.pressure_mean;
    rec.norms.p = p;
    rec.norms.grad_velocity_lp = lp_norm_gradient(*mesh, s.velocity, p, o.quad_degree).value;
    rec.norms.pressure_lp = lp_norm_pressure(*s.pressure_space, *mesh, pr, p, o.quad_degree).value;
    rec.norms.velocity_lp = lp_norm_velocity(*mesh, s.velocity, p, o.quad_degree).value;
    rec.norms.source_lp = lp_norm(*mesh, f, p, o.quad_degree).value;
    rec.ratio = rec.norms.source_lp > 0 ? (rec.norms.grad_velocity_lp + rec.norms.pressure_lp) / rec.norms.source_lp : 0.0;
    rec.dofs = s.dofs();
    rec.seconds = seconds_since(t0);
    return rec;
  };
  std::vector<std::optional<SweepRecord>> points;
  std::vector<std::string> failures;
  run_points(eps, points, failures, [&](int i) { return point(options, eps[i]); });
  SweepResult r = collect(points, std::move(failures));
  refine_smallest(r, options, [&](const SweepOptions& o, double e) { return point(o, e).ratio; });
  return r;
}

}  // namespace holelab
