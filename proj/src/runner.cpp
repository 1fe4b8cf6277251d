#include "holelab/runner.hpp"

#include "holelab/bogovskii.hpp"
#include "holelab/errors.hpp"
#include "holelab/expression.hpp"
#include "holelab/mesher.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace holelab {

namespace fs = std::filesystem;

TensorField make_source(const ExperimentConfig& c) {
  const auto& s = c.source;
  if (s.kind == "dipole") return default_source();
  if (s.kind == "channel") return channel_source();
  if (s.kind == "pressure-only") return pressure_only_source();
  std::array<Expression, 4> g{Expression::parse(s.g[0]), Expression::parse(s.g[1]), Expression::parse(s.g[2]),
                              Expression::parse(s.g[3])};
  return TensorField::closed_form(
      [g](const Point& x) {
        Mat2 m;
        m << g[0](x), g[1](x), g[2](x), g[3](x);
        return m;
      },
      "expression source");
}

DomainSpec make_domain(const ExperimentConfig& c) {
  DomainSpec d;
  d.outer = c.outer;
  d.half_size = c.half_size;
  d.hole = c.hole;
  d.epsilon = c.epsilon;
  return d;
}

PerforatedDomain make_perforated(const ExperimentConfig& c, double eps) {
  const int n = static_cast<int>(std::lround(1.0 / eps));
  return build_perforated(n, c.alpha, c.hole, c.b1, c.rotation_seed, c.delta);
}

SweepOptions make_sweep_options(const ExperimentConfig& c) {
  SweepOptions o;
  o.n_hole = c.n_hole;
  o.h_far = c.h_far;
  o.quad_degree = c.quad_degree;
  o.refinement_check = c.refinement_check;
  return o;
}

PointVector make_field(const ExperimentConfig& c) {
  const Expression u1 = Expression::parse(c.field[0]), u2 = Expression::parse(c.field[1]);
  return [u1, u2](const Point& x) { return Vec2(u1(x), u2(x)); };
}

namespace {

std::string p_label(double p) {
  std::ostringstream os;
  os << "p=" << p;
  return os.str();
}

struct Writer {
  fs::path dir;
  std::string name;
  RunResult& result;
  const RunOptions& options;

  fs::path path(const std::string& ext) const { return dir / (name + ext); }

  void text(const std::string& ext, const std::string& content) { file(path(ext), content); }

  void file(const fs::path& p, const std::string& content) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + p.string());
    out << content;
    if (!out) throw ConfigError("write failed for " + p.string());
    result.files.push_back(p.string());
  }
};

Verdict make_verdict(const ExperimentConfig& c, std::string check) {
  Verdict v;
  v.claim = c.anchor;
  v.check = std::move(check);
  return v;
}

void add_threshold(Verdict& v, const ExperimentConfig& c, const std::string& key) {
  if (auto t = c.threshold(key)) v.thresholds.emplace_back(key, *t);
}

PlotSeries series_of(const std::string& label, const std::vector<SweepRecord>& recs, const GrowthFit& fit) {
  PlotSeries s;
  s.label = label;
  for (const auto& r : recs) {
    s.eps.push_back(r.epsilon);
    s.values.push_back(r.ratio);
  }
  if (recs.size() >= static_cast<std::size_t>(fit.window)) s.slope = fit.slope;
  return s;
}

void fit_measures(Verdict& v, const SweepResult& r) {
  v.measured.emplace_back("points", static_cast<double>(r.records.size()));
  v.measured.emplace_back("slope", r.fit.slope);
  v.measured.emplace_back("fit_residual", r.fit.residual);
  v.measured.emplace_back("band", r.fit.band);
  v.measured.emplace_back("increasing", r.fit.increasing ? 1.0 : 0.0);
  if (!r.records.empty()) {
    v.measured.emplace_back("first_ratio", r.records.front().ratio);
    v.measured.emplace_back("last_ratio", r.records.back().ratio);
  }
  v.measured.emplace_back("refinement_change", r.refinement_change);
  v.labels.push_back("trend " + to_string(r.fit.verdict));
}

void run_sweep(const ExperimentConfig& c, Writer& w) {
  RunResult& res = w.result;
  const DomainSpec family = make_domain(c);
  const SweepOptions opt = make_sweep_options(c);
  std::vector<SweepRecord> all;
  std::vector<PlotSeries> plot;
  std::string y_label = "ratio";

  for (double p : c.p_list) {
    switch (c.sweep) {
      case SweepKind::uniform: {
        const TensorField G = make_source(c);
        const SweepResult r = run_uniform_sweep(family, G, p, c.eps_list, opt);
        Verdict v = make_verdict(c, "uniform estimate " + p_label(p));
        fit_measures(v, r);
        double energy = 0.0;
        for (const auto& rec : r.records)
          if (rec.norms.source_lp > 0) energy = std::max(energy, rec.norms.grad_velocity_lp / rec.norms.source_lp);
        if (p == 2.0) v.measured.emplace_back("max_velocity_ratio", energy);
        add_threshold(v, c, "band");
        const bool complete = r.failures.empty() && r.records.size() >= static_cast<std::size_t>(r.fit.window);
        v.status = decide(c.threshold("band"), complete && r.fit.band <= c.threshold("band").value_or(0));
        res.verdicts.push_back(v);
        res.failures.insert(res.failures.end(), r.failures.begin(), r.failures.end());
        all.insert(all.end(), r.records.begin(), r.records.end());
        plot.push_back(series_of(p_label(p), r.records, r.fit));
        break;
      }
      case SweepKind::blowup: {
        const TensorField G = make_source(c);
        DomainSpec omega = family;
        const CenterCheck center = verify_nondegenerate_center(omega, G, opt.h_far);
        const SweepResult r = run_blowup_sweep(family, G, p, c.eps_list, opt);
        Verdict v = make_verdict(c, "blow-up " + p_label(p));
        v.measured.emplace_back("center_value", center.magnitude);
        v.measured.emplace_back("center_error_bar", center.error_bar);
        fit_measures(v, r);
        add_threshold(v, c, "growth_slope");
        const bool complete = r.failures.empty() && r.records.size() >= static_cast<std::size_t>(r.fit.window);
        v.status = decide(c.threshold("growth_slope"),
                          complete && r.fit.increasing && r.fit.slope > c.threshold("growth_slope").value_or(0));
        res.verdicts.push_back(v);
        res.failures.insert(res.failures.end(), r.failures.begin(), r.failures.end());
        all.insert(all.end(), r.records.begin(), r.records.end());
        plot.push_back(series_of(p_label(p), r.records, r.fit));
        break;
      }
      case SweepKind::dual_blowup: {
        const TensorField G = make_source(c);
        const DualSweepResult d = run_dual_blowup_sweep(family, G, p, c.eps_list, opt);
        Verdict v = make_verdict(c, "dual blow-up " + p_label(p));
        fit_measures(v, d.sweep);
        double norm_err = 0, dual_err = 0, lower = 1e300;
        for (const auto& pt : d.points) {
          norm_err = std::max(norm_err, std::abs(pt.h_norm - 1.0));
          dual_err = std::max(dual_err, pt.duality_error);
          if (pt.lower_bound > 0) lower = std::min(lower, pt.grad_w / pt.lower_bound);
        }
        v.measured.emplace_back("normalization_error", norm_err);
        v.measured.emplace_back("duality_error", dual_err);
        v.measured.emplace_back("min_lower_bound_ratio", d.points.empty() ? 0.0 : lower);
        add_threshold(v, c, "normalization");
        add_threshold(v, c, "duality");
        add_threshold(v, c, "growth_slope");
        const bool any = c.threshold("normalization") || c.threshold("duality") || c.threshold("growth_slope");
        bool ok = d.sweep.failures.empty() && d.sweep.records.size() >= static_cast<std::size_t>(d.sweep.fit.window) &&
                  d.sweep.fit.increasing;
        if (auto t = c.threshold("normalization")) ok = ok && norm_err <= *t;
        if (auto t = c.threshold("duality")) ok = ok && dual_err <= *t;
        if (auto t = c.threshold("growth_slope")) ok = ok && d.sweep.fit.slope > *t;
        v.status = any ? (ok ? Status::pass : Status::fail) : Status::inconclusive;
        res.verdicts.push_back(v);
        res.failures.insert(res.failures.end(), d.sweep.failures.begin(), d.sweep.failures.end());
        all.insert(all.end(), d.sweep.records.begin(), d.sweep.records.end());
        plot.push_back(series_of(p_label(p), d.sweep.records, d.sweep.fit));
        y_label = "grad w";
        break;
      }
      case SweepKind::rescaling: {
        const TensorField G = make_source(c);
        Verdict v = make_verdict(c, "rescaling equivalence " + p_label(p));
        double worst = 0, law = 0;
        for (double e : c.eps_list) {
          const RescalingResult r = rescaling_consistency(family, G, p, e, opt);
          worst = std::max(worst, r.discrepancy);
          law = std::max(law, r.gradient_law_error);
          SweepRecord rec;
          rec.epsilon = e;
          rec.p = p;
          rec.norms = r.original;
          rec.ratio = r.ratio_original;
          rec.dofs = r.dofs;
          all.push_back(rec);
        }
        v.measured.emplace_back("max_discrepancy", worst);
        v.measured.emplace_back("max_gradient_law_error", law);
        add_threshold(v, c, "discrepancy");
        const double t = c.threshold("discrepancy").value_or(0);
        v.status = decide(c.threshold("discrepancy"), worst <= t && law <= t);
        res.verdicts.push_back(v);
        break;
      }
      case SweepKind::enlarging: {
        BumpForce g;
        g.radius = c.source.bump_radius;
        g.amplitude = c.source.bump_amplitude;
        const SweepResult r = run_enlarging_domain_sweep(family, g, p, c.eps_list, opt);
        Verdict v = make_verdict(c, "enlarging domain " + p_label(p));
        fit_measures(v, r);
        v.labels.push_back("energy-method justification in 2D");
        add_threshold(v, c, "band");
        const bool complete = r.failures.empty() && r.records.size() >= static_cast<std::size_t>(r.fit.window);
        v.status = decide(c.threshold("band"), complete && r.fit.band <= c.threshold("band").value_or(0));
        res.verdicts.push_back(v);
        res.failures.insert(res.failures.end(), r.failures.begin(), r.failures.end());
        all.insert(all.end(), r.records.begin(), r.records.end());
        plot.push_back(series_of(p_label(p), r.records, r.fit));
        break;
      }
    }
  }
  std::ostringstream csv;
  write_sweep_csv(csv, all, c.timing);
  w.text(".csv", csv.str());
  w.text(".json", verdicts_json(to_string(c.sweep), c.name, res.verdicts, res.failures));
  if (c.svg && !plot.empty()) w.text(".svg", loglog_svg(c.name, y_label, plot));
}

std::vector<std::unique_ptr<PerforatedMesh>> perforated_family(const ExperimentConfig& c) {
  std::vector<std::unique_ptr<PerforatedMesh>> out;
  for (double e : c.eps_list) out.push_back(std::make_unique<PerforatedMesh>(make_perforated(c, e), c.n_hole, c.h_far));
  return out;
}

double h1_norm(const TriMesh& mesh, const Eigen::VectorXd& u) {
  return std::hypot(lp_norm_gradient(mesh, u, 2.0).value, lp_norm_velocity(mesh, u, 2.0).value);
}

void run_restrict(const ExperimentConfig& c, Writer& w) {
  RunResult& res = w.result;
  const auto family = perforated_family(c);
  const PointVector field = make_field(c);
  const TensorField G = make_source(c);

  const auto& verify = w.options.verify;
  if (verify && *verify != "extension" && *verify != "divfree" && *verify != "norm")
    throw ConfigError("--verify must be extension, divfree or norm");
  const bool do_ext = !verify || *verify == "extension";
  const bool do_div = !verify || *verify == "divfree";
  const bool do_norm = !verify || *verify == "norm";

  double ext = 0, div_in = 0, div_out = 0, unit = 0, mismatch = 0;
  std::vector<std::vector<double>> rows;
  const double nan = std::nan("");
  std::vector<double> ext_e(family.size(), nan), in_e(family.size(), nan), out_e(family.size(), nan),
      unit_e(family.size(), nan);
  for (std::size_t i = 0; i < family.size(); ++i) {
    const PerforatedMesh& pm = *family[i];
    if (do_ext) {
      const Eigen::VectorXd u = interpolate_p2(*pm.full(), field);
      const Eigen::VectorXd ut = pm.zero_on_holes(u);
      const RestrictionResult r1 = restrict_field(pm, ut);
      const Eigen::VectorXd uf = pm.to_fluid(ut);
      const double n1 = h1_norm(*pm.fluid(), uf);
      ext_e[i] = n1 > 0 ? h1_norm(*pm.fluid(), Eigen::VectorXd(r1.velocity - uf)) / n1 : 0.0;
      unit_e[i] = unit_annulus_consistency(pm, 0, u).discrepancy;
      ext = std::max(ext, ext_e[i]);
      unit = std::max(unit, unit_e[i]);
      mismatch = std::max(mismatch, r1.max_mismatch);
    }
    if (do_div) {
      const StokesSolution s = solve_div_form(pm.full_operator(), G);
      in_e[i] = relative_divergence_residual(*pm.full(), *pm.broken_pressure(), s.velocity);
      const RestrictionResult r2 = restrict_field(pm, s.velocity);
      out_e[i] = relative_divergence_residual(*pm.fluid(), pm.fluid_operator()->pressure_space(), r2.velocity);
      div_in = std::max(div_in, in_e[i]);
      div_out = std::max(div_out, out_e[i]);
      mismatch = std::max(mismatch, r2.max_mismatch);
    }
  }

  if (do_ext) {
    Verdict ve = make_verdict(c, "extension identity");
    ve.measured = {{"max_relative_h1_error", ext}, {"max_cell_mismatch", mismatch}};
    add_threshold(ve, c, "extension");
    ve.status = decide(c.threshold("extension"), ext <= c.threshold("extension").value_or(0));
    Verdict vu = make_verdict(c, "unit annulus consistency");
    vu.measured = {{"max_discrepancy", unit}};
    add_threshold(vu, c, "discrepancy");
    vu.status = decide(c.threshold("discrepancy"), unit <= c.threshold("discrepancy").value_or(0));
    res.verdicts.push_back(ve);
    res.verdicts.push_back(vu);
  }
  if (do_div) {
    Verdict vd = make_verdict(c, "divergence preservation");
    vd.measured = {{"max_input_residual", div_in}, {"max_output_residual", div_out}, {"max_cell_mismatch", mismatch}};
    add_threshold(vd, c, "divergence");
    vd.status = decide(c.threshold("divergence"), div_out <= c.threshold("divergence").value_or(0));
    res.verdicts.push_back(vd);
  }

  std::vector<const PerforatedMesh*> ptrs;
  for (const auto& pm : family) ptrs.push_back(pm.get());
  std::vector<PlotSeries> plot;
  for (double p : do_norm ? c.p_list : std::vector<double>{}) {
    RestrictionConstantTable t = measure_restriction_constant(ptrs, {field}, p);
    if (auto th = c.threshold("band")) t.band_threshold = *th;
    t.bounded = t.band <= t.band_threshold;
    Verdict vn = make_verdict(c, "restriction norm bound " + p_label(p));
    PlotSeries ser;
    ser.label = p_label(p);
    for (std::size_t i = 0; i < t.samples.size(); ++i) {
      const auto& s = t.samples[i];
      vn.measured.emplace_back("constant_eps_" + std::to_string(static_cast<int>(std::lround(1.0 / s.epsilon))),
                               s.constant);
      ser.eps.push_back(s.epsilon);
      ser.values.push_back(s.constant);
      const std::size_t k = i;
      rows.push_back({s.epsilon, c.alpha, p, s.grad_restricted, s.grad_u, s.u_norm, s.exponent, s.constant, ext_e[k],
                      in_e[k], out_e[k], unit_e[k]});
    }
    vn.measured.emplace_back("band", t.band);
    vn.labels.push_back("extrapolated exponent");
    for (const auto& n : t.notices) vn.labels.push_back(n);
    add_threshold(vn, c, "band");
    vn.status = decide(c.threshold("band"), t.bounded, Status::extrapolated);
    res.verdicts.push_back(vn);
    plot.push_back(ser);
  }

  std::ostringstream csv;
  if (!do_norm)
    for (std::size_t i = 0; i < family.size(); ++i)
      rows.push_back({family[i]->epsilon(), c.alpha, nan, nan, nan, nan, nan, nan, ext_e[i], in_e[i], out_e[i],
                      unit_e[i]});
  write_table_csv(csv,
                  {"epsilon", "alpha", "p", "grad_restricted", "grad_u", "u_norm", "exponent", "constant",
                   "extension_error", "divergence_input", "divergence_output", "unit_annulus"},
                  rows);
  w.text(".csv", csv.str());
  w.text(".json", verdicts_json("restrict", c.name, res.verdicts, res.failures));
  if (c.svg && do_norm) w.text(".svg", loglog_svg(c.name, "C", plot));
}

ScalarField rhs_for(const ExperimentConfig& c, const PerforatedMesh& pm, int i) {
  const std::uint64_t seed = c.seed + 1 + static_cast<std::uint64_t>(i);
  if (c.rhs_kind == "random-p1") return random_mean_zero(pm, seed);
  if (c.rhs_kind == "expression") {
    const Expression f = Expression::parse(c.rhs_expression);
    return remove_mean(*pm.fluid(), ScalarField::closed_form([f](const Point& x) { return f(x); }, "f"), 10);
  }
  return random_smooth_mean_zero(pm, seed, c.rhs_modes);
}

void run_bogovskii(const ExperimentConfig& c, Writer& w) {
  RunResult& res = w.result;
  const auto family = perforated_family(c);
  const int count = c.rhs_kind == "expression" ? 1 : c.rhs_count;

  double residual = 0, ext = 0, mismatch = 0;
  std::vector<std::vector<double>> rows;
  // constants[p index][rhs index][eps index]
  std::vector<std::vector<std::vector<double>>> constants(
      c.p_list.size(), std::vector<std::vector<double>>(count, std::vector<double>()));
  for (const auto& pm : family) {
    for (int i = 0; i < count; ++i) {
      const ScalarField f = rhs_for(c, *pm, i);
      const BogovskiiResult b = bogovskii_perforated(*pm, f);
      const double r = divergence_residual(*pm, b.velocity, f);
      const double nf = lp_norm(*pm->fluid(), f, 2.0).value;
      const double ne = lp_norm(*pm->full(), zero_extend(*pm, f), 2.0).value;
      const double ze = nf > 0 ? std::abs(ne - nf) / nf : 0.0;
      residual = std::max(residual, r);
      ext = std::max(ext, ze);
      mismatch = std::max(mismatch, b.max_mismatch);
      for (std::size_t j = 0; j < c.p_list.size(); ++j) {
        const BogovskiiNorm bn = bogovskii_norm(*pm, b.velocity, f, c.p_list[j]);
        constants[j][i].push_back(bn.constant);
        rows.push_back({pm->epsilon(), c.alpha, static_cast<double>(c.seed + 1 + i), c.p_list[j], r, bn.w_norm,
                        bn.f_norm, bn.exponent, bn.constant, ze});
      }
    }
  }

  Verdict vr = make_verdict(c, "divergence identity");
  vr.measured = {{"max_residual", residual}, {"max_cell_mismatch", mismatch}};
  add_threshold(vr, c, "residual");
  vr.status = decide(c.threshold("residual"), residual <= c.threshold("residual").value_or(0));
  Verdict vz = make_verdict(c, "zero extension norm");
  vz.measured = {{"max_relative_difference", ext}};
  add_threshold(vz, c, "zero_extension");
  vz.status = decide(c.threshold("zero_extension"), ext <= c.threshold("zero_extension").value_or(0));
  res.verdicts.push_back(vr);
  res.verdicts.push_back(vz);

  std::vector<PlotSeries> plot;
  for (std::size_t j = 0; j < c.p_list.size(); ++j) {
    Verdict vn = make_verdict(c, "Bogovskii norm bound " + p_label(c.p_list[j]));
    double band = 1.0;
    for (int i = 0; i < count; ++i) {
      const auto& v = constants[j][i];
      const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
      const double b = *lo > 0 ? *hi / *lo : INFINITY;
      band = std::max(band, b);
      vn.measured.emplace_back("band_rhs_" + std::to_string(i + 1), b);
      PlotSeries ser;
      ser.label = p_label(c.p_list[j]) + " rhs " + std::to_string(i + 1);
      ser.eps = c.eps_list;
      ser.values = v;
      plot.push_back(ser);
    }
    vn.measured.emplace_back("band", band);
    vn.labels.push_back("extrapolated exponent");
    add_threshold(vn, c, "band");
    vn.status = decide(c.threshold("band"), band <= c.threshold("band").value_or(0), Status::extrapolated);
    res.verdicts.push_back(vn);
  }

  std::ostringstream csv;
  write_table_csv(csv,
                  {"epsilon", "alpha", "seed", "p", "residual", "w_norm", "f_norm", "exponent", "constant",
                   "zero_extension_error"},
                  rows);
  w.text(".csv", csv.str());
  w.text(".json", verdicts_json("bogovskii", c.name, res.verdicts, res.failures));
  if (c.svg) w.text(".svg", loglog_svg(c.name, "C", plot));
}

TriMesh config_mesh(const ExperimentConfig& c) {
  if (c.perforated) {
    const double eps = c.eps_list.empty() ? c.epsilon : c.eps_list.front();
    return mesh_perforated(make_perforated(c, eps), c.n_hole, c.h_far);
  }
  DomainSpec d = make_domain(c);
  d.validate();
  return mesh_single_hole(d, c.h_far, c.n_hole);
}

void run_mesh(const ExperimentConfig& c, Writer& w) {
  const TriMesh mesh = config_mesh(c);
  std::ostringstream os;
  write_mesh(os, mesh);
  if (w.options.out_file)
    w.file(*w.options.out_file, os.str());
  else
    w.text(".mesh", os.str());
  Verdict v;
  v.claim = c.anchor.empty() ? c.name : c.anchor;
  v.check = "mesh";
  v.measured = {{"vertices", static_cast<double>(mesh.num_vertices())},
                {"triangles", static_cast<double>(mesh.num_triangles())},
                {"min_angle_degrees", mesh.min_angle_degrees()},
                {"max_edge_length", mesh.max_edge_length()},
                {"area", mesh.area()}};
  w.result.verdicts.push_back(v);
  w.text(".json", verdicts_json("mesh", c.name, w.result.verdicts, w.result.failures));
}

void run_solve(const ExperimentConfig& c, Writer& w) {
  const MeshPtr mesh = share(w.options.mesh ? read_mesh_file(*w.options.mesh) : config_mesh(c));
  const TensorField G = make_source(c);
  const StokesSolution s = solve_div_form(StokesOperator::make(mesh), G);
  std::ostringstream sol;
  write_solution(sol, s);
  if (w.options.out_file)
    w.file(*w.options.out_file, sol.str());
  else
    w.text(".solution", sol.str());
  std::vector<SweepRecord> recs;
  Verdict v;
  v.claim = c.anchor.empty() ? c.name : c.anchor;
  v.check = "solve";
  for (double p : c.p_list) {
    SweepRecord r;
    r.epsilon = c.epsilon;
    r.p = p;
    r.norms = norm_report(s, G, p, c.quad_degree);
    r.ratio = r.norms.source_lp > 0 ? estimate_ratio(r.norms) : 0.0;
    r.dofs = s.dofs();
    recs.push_back(r);
    v.measured.emplace_back("ratio_" + p_label(p), r.ratio);
  }
  v.measured.emplace_back("residual", s.residual);
  const NormReport e2 = norm_report(s, G, 2.0, c.quad_degree);
  const double excess = e2.grad_velocity_lp - e2.source_lp;
  v.measured.emplace_back("energy_excess", excess);
  add_threshold(v, c, "energy");
  v.status = decide(c.threshold("energy"), excess <= c.threshold("energy").value_or(0));
  w.result.verdicts.push_back(v);
  std::ostringstream csv;
  write_sweep_csv(csv, recs, false);
  w.text(".csv", csv.str());
  w.text(".json", verdicts_json("solve", c.name, w.result.verdicts, w.result.failures));
}

}  // namespace

RunResult run(const ExperimentConfig& c, const RunOptions& options) {
  RunResult res;
  const fs::path dir = options.out_dir ? fs::path(*options.out_dir) : fs::path(c.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());
  Writer w{dir, c.name, res, options};
  switch (c.kind) {
    case ExperimentKind::mesh: run_mesh(c, w); break;
    case ExperimentKind::solve: run_solve(c, w); break;
    case ExperimentKind::sweep: run_sweep(c, w); break;
    case ExperimentKind::restrict: run_restrict(c, w); break;
    case ExperimentKind::bogovskii: run_bogovskii(c, w); break;
  }
  res.exit_code = exit_code(res.verdicts);
  return res;
}

}  // namespace holelab
