#include "holelab/restriction.hpp"

#include "holelab/errors.hpp"
#include "holelab/parallel.hpp"

#include <cmath>
#include <exception>
#include <sstream>

namespace holelab {

namespace {

std::string cell_prefix(int k) { return "cell k = " + std::to_string(k) + ": "; }

/// Rethrows the active exception with the cell index prepended, keeping its type.
[[noreturn]] void rethrow_for_cell(int k) {
  try {
    throw;
  } catch (const CompatibilityError& e) {
    throw CompatibilityError(cell_prefix(k) + e.what(), e.mismatch());
  } catch (const SolverError& e) {
    throw SolverError(cell_prefix(k) + e.what());
  } catch (const ConfigError& e) {
    throw ConfigError(cell_prefix(k) + e.what());
  } catch (const PreconditionError& e) {
    throw PreconditionError(cell_prefix(k) + e.what());
  } catch (const Error& e) {
    throw Error(cell_prefix(k) + e.what());
  }
}

Vec2 nodal(const Eigen::VectorXd& u, int node) { return Vec2(u[2 * node], u[2 * node + 1]); }

/// Divergence datum div u + c on the given mesh.
ScalarField shifted_divergence(MeshPtr mesh, std::shared_ptr<const Eigen::VectorXd> u, double c) {
  return ScalarField::from_quad(
      [mesh, u, c](const QuadPoint& q) { return p2_gradient(*mesh, *u, q.triangle, q.bary).trace() + c; },
      "div u + c_k");
}

/// Local problem on an annulus mesh whose boundary carries ball_tag (data u)
/// and hole_tag (zero).
SaddleSystem local_system(std::shared_ptr<const StokesOperator> op, std::shared_ptr<const Eigen::VectorXd> u_local,
                          double c, int ball_tag, int hole_tag) {
  StokesRhs rhs;
  rhs.laplacian_of = u_local;
  const ScalarField datum = shifted_divergence(op->mesh_ptr(), u_local, c);
  Dirichlet bc;
  bc.set(ball_tag, [u_local](int node, const Point&) { return nodal(*u_local, node); });
  bc.set(hole_tag, [](int, const Point&) { return Vec2(Vec2::Zero()); });
  return assemble(std::move(op), rhs, &datum, bc);
}

double relative_max_difference(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double scale = std::max(a.lpNorm<Eigen::Infinity>(), b.lpNorm<Eigen::Infinity>());
  if (scale == 0.0) return 0.0;
  return (a - b).lpNorm<Eigen::Infinity>() / scale;
}

}  // namespace

PerforatedMesh::PerforatedMesh(PerforatedDomain pd, int n_hole, double h_far) : pd_(std::move(pd)), n_hole_(n_hole) {
  full_ = share(mesh_perforated(pd_, n_hole, h_far));
  const TriMesh& m = *full_;
  fluid_sub_ = extract_fluid(m);
  fluid_ = share(fluid_sub_.mesh);

  const int ncells = pd_.num_cells();
  annuli_.reserve(ncells);
  for (int k = 0; k < ncells; ++k) {
    annuli_.push_back(extract_annulus(m, k));
    annulus_meshes_.push_back(share(annuli_.back().mesh));
  }

  full_to_fluid_.assign(m.num_quadratic_nodes(), -1);
  for (int i = 0; i < fluid_->num_quadratic_nodes(); ++i) full_to_fluid_[fluid_sub_.node_to_parent(i, m)] = i;
  full_to_fluid_tri_.assign(m.num_triangles(), -1);
  for (int t = 0; t < fluid_->num_triangles(); ++t) full_to_fluid_tri_[fluid_sub_.triangle_to_parent[t]] = t;

  fluid_mask_.assign(m.num_triangles(), 0);
  closed_hole_node_.assign(m.num_quadratic_nodes(), 0);
  hole_area_.assign(ncells, 0.0);
  std::vector<int> labels(m.num_triangles(), 0);
  for (int t = 0; t < m.num_triangles(); ++t) {
    const int r = m.regions[t];
    if (!region::is_hole_interior(r)) {
      fluid_mask_[t] = 1;
      continue;
    }
    const int k = region::cell_of(r);
    labels[t] = k + 1;
    hole_area_[k] += m.triangle_area(t);
    for (int node : p2_nodes(m, t)) closed_hole_node_[node] = 1;
  }
  broken_ = std::make_shared<const PressureSpace>(PressureSpace::broken(m, labels));
  local_ops_.resize(ncells);
  for (int k = 0; k < ncells; ++k) local_once_.push_back(std::make_unique<std::once_flag>());
}

std::shared_ptr<const StokesOperator> PerforatedMesh::full_operator() const {
  std::lock_guard<std::mutex> lock(mutex_);
  if (!full_op_) full_op_ = StokesOperator::make(full_, broken_);
  return full_op_;
}

std::shared_ptr<const StokesOperator> PerforatedMesh::fluid_operator() const {
  std::lock_guard<std::mutex> lock(mutex_);
  if (!fluid_op_) fluid_op_ = StokesOperator::make(fluid_);
  return fluid_op_;
}

std::shared_ptr<const StokesOperator> PerforatedMesh::local_operator(int k) const {
  if (k < 0 || k >= num_cells()) throw PreconditionError("cell index out of range");
  std::call_once(*local_once_[k], [&] { local_ops_[k] = StokesOperator::make(annulus_meshes_[k]); });
  return local_ops_[k];
}

Eigen::VectorXd PerforatedMesh::to_fluid(const Eigen::VectorXd& u_full) const {
  if (u_full.size() != 2 * full_->num_quadratic_nodes()) throw PreconditionError("field does not live on the mesh of D");
  const int nn = fluid_->num_quadratic_nodes();
  Eigen::VectorXd out(2 * nn);
  for (int i = 0; i < nn; ++i) {
    const int P = fluid_sub_.node_to_parent(i, *full_);
    out[2 * i] = u_full[2 * P];
    out[2 * i + 1] = u_full[2 * P + 1];
  }
  return out;
}

Eigen::VectorXd PerforatedMesh::from_fluid(const Eigen::VectorXd& u_fluid) const {
  if (u_fluid.size() != 2 * fluid_->num_quadratic_nodes())
    throw PreconditionError("field does not live on the mesh of D_eps");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(2 * full_->num_quadratic_nodes());
  for (int P = 0; P < full_->num_quadratic_nodes(); ++P) {
    const int i = full_to_fluid_[P];
    if (i < 0) continue;
    out[2 * P] = u_fluid[2 * i];
    out[2 * P + 1] = u_fluid[2 * i + 1];
  }
  return out;
}

Eigen::VectorXd PerforatedMesh::zero_on_holes(const Eigen::VectorXd& u_full) const {
  if (u_full.size() != 2 * full_->num_quadratic_nodes()) throw PreconditionError("field does not live on the mesh of D");
  Eigen::VectorXd out = u_full;
  for (int P = 0; P < full_->num_quadratic_nodes(); ++P)
    if (closed_hole_node_[P]) out[2 * P] = out[2 * P + 1] = 0.0;
  return out;
}

std::vector<double> hole_divergence_integrals(const PerforatedMesh& pm, const Eigen::VectorXd& u_full) {
  const TriMesh& m = *pm.full();
  const QuadRule& rule = triangle_rule(4);
  std::vector<double> out(pm.num_cells(), 0.0);
  for (int t = 0; t < m.num_triangles(); ++t) {
    if (!region::is_hole_interior(m.regions[t])) continue;
    double acc = 0.0;
    for (int i = 0; i < rule.size(); ++i) acc += rule.weights[i] * p2_gradient(m, u_full, t, rule.bary[i]).trace();
    out[region::cell_of(m.regions[t])] += m.triangle_area(t) * acc;
  }
  return out;
}

namespace {

CellSolve solve_cell(const PerforatedMesh& pm, int k, const Eigen::VectorXd& u_full, double hole_integral) {
  const SubMesh& sub = pm.annulus(k);
  const TriMesh& parent = *pm.full();
  const int nn = sub.mesh.num_quadratic_nodes();
  CellSolve out;
  out.cell = k;
  out.u_local.resize(2 * nn);
  for (int i = 0; i < nn; ++i) {
    const int P = sub.node_to_parent(i, parent);
    out.u_local[2 * i] = u_full[2 * P];
    out.u_local[2 * i + 1] = u_full[2 * P + 1];
  }
  out.hole_divergence = hole_integral / sub.mesh.area();
  try {
    auto op = pm.local_operator(k);
    const SaddleSystem sys = local_system(op, std::make_shared<const Eigen::VectorXd>(out.u_local),
                                          out.hole_divergence, edge_tag::ball(k), edge_tag::hole(k));
    out.compatibility_mismatch = sys.compatibility_mismatch;
    out.solution = solve(sys);
  } catch (const Error&) {
    rethrow_for_cell(k);
  }
  return out;
}

void check_zero_trace(const TriMesh& m, const Eigen::VectorXd& u) {
  const double scale = u.lpNorm<Eigen::Infinity>();
  double worst = 0.0;
  for (int e : m.boundary_edges()) {
    const auto& ed = m.edges()[e];
    for (int node : {ed[0], ed[1], m.num_vertices() + e}) worst = std::max(worst, nodal(u, node).norm());
  }
  if (worst > 1e-12 * scale) {
    std::ostringstream os;
    os << "restriction needs zero trace on the outer boundary (max |u| there = " << worst << ")";
    throw PreconditionError(os.str());
  }
}

}  // namespace

CellSolve solve_cell_problem(const PerforatedMesh& pm, int k, const Eigen::VectorXd& u_full) {
  if (u_full.size() != 2 * pm.full()->num_quadratic_nodes()) throw PreconditionError("field does not live on the mesh of D");
  return solve_cell(pm, k, u_full, hole_divergence_integrals(pm, u_full).at(k));
}

RestrictionResult restrict_field(const PerforatedMesh& pm, const Eigen::VectorXd& u_full) {
  const TriMesh& parent = *pm.full();
  if (u_full.size() != 2 * parent.num_quadratic_nodes()) throw PreconditionError("field does not live on the mesh of D");
  check_zero_trace(parent, u_full);

  RestrictionResult out;
  out.velocity = pm.to_fluid(u_full);
  const int ncells = pm.num_cells();
  out.cell_mismatch.assign(ncells, 0.0);
  const std::vector<double> holes = hole_divergence_integrals(pm, u_full);
  std::vector<std::exception_ptr> errors(ncells);
  parallel_chunks(ncells, ncells, [&](int, int b, int e) {
    for (int k = b; k < e; ++k) {
      try {
        const CellSolve cs = solve_cell(pm, k, u_full, holes[k]);
        out.cell_mismatch[k] = cs.compatibility_mismatch;
        const SubMesh& sub = pm.annulus(k);
        for (int i = 0; i < sub.mesh.num_quadratic_nodes(); ++i) {
          const int f = pm.fluid_node(sub.node_to_parent(i, parent));
          out.velocity[2 * f] = cs.solution.velocity[2 * i];
          out.velocity[2 * f + 1] = cs.solution.velocity[2 * i + 1];
        }
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  });
  for (const auto& err : errors)
    if (err) std::rethrow_exception(err);
  for (double v : out.cell_mismatch) out.max_mismatch = std::max(out.max_mismatch, v);
  return out;
}

double restriction_exponent(double p, int d, double alpha) {
  if (!(p > 1.0) || !(p <= d)) {
    std::ostringstream os;
    os << "restriction exponent needs 1 < p <= d (p = " << p << ", d = " << d << ")";
    throw DomainError(os.str());
  }
  return ((d - p) * alpha - d) / p;
}

RestrictionConstantTable measure_restriction_constant(const std::vector<const PerforatedMesh*>& meshes,
                                                      const std::vector<PointVector>& fields, double p) {
  RestrictionConstantTable table;
  table.p = p;
  std::vector<double> lo(fields.size(), 1e300), hi(fields.size(), 0.0);
  std::vector<char> used(fields.size(), 0);
  for (const PerforatedMesh* pm : meshes) {
    const double eps = pm->epsilon();
    const double expo = restriction_exponent(p, 2, pm->domain().alpha);
    for (std::size_t i = 0; i < fields.size(); ++i) {
      const Eigen::VectorXd u = interpolate_p2(*pm->full(), fields[i]);
      if (u.lpNorm<Eigen::Infinity>() == 0.0) {
        std::ostringstream os;
        os << "field " << i << " vanishes at eps = " << eps << "; skipped";
        table.notices.push_back(os.str());
        continue;
      }
      RestrictionSample s;
      s.epsilon = eps;
      s.field = static_cast<int>(i);
      s.exponent = expo;
      s.grad_restricted = lp_norm_gradient(*pm->fluid(), restrict_field(*pm, u).velocity, p).value;
      s.grad_u = lp_norm_gradient(*pm->full(), u, p).value;
      s.u_norm = lp_norm_velocity(*pm->full(), u, p).value;
      s.constant = s.grad_restricted / (s.grad_u + std::pow(eps, expo) * s.u_norm);
      lo[i] = std::min(lo[i], s.constant);
      hi[i] = std::max(hi[i], s.constant);
      used[i] = 1;
      table.samples.push_back(s);
    }
  }
  for (std::size_t i = 0; i < fields.size(); ++i)
    if (used[i] && lo[i] > 0.0) table.band = std::max(table.band, hi[i] / lo[i]);
  table.bounded = table.band <= table.band_threshold;
  return table;
}

double lift_cutoff(double r, double eta) {
  if (r <= eta) return 1.0;
  if (r >= 2.0 * eta) return 0.0;
  const double s = (r - eta) / eta;
  return 1.0 - s * s * (3.0 - 2.0 * s);
}

double lift_cutoff_derivative(double r, double eta) {
  if (r <= eta || r >= 2.0 * eta) return 0.0;
  const double s = (r - eta) / eta;
  return -6.0 * s * (1.0 - s) / eta;
}

namespace {

void check_eta(double eta) {
  if (!(eta > 0.0) || !(eta < 0.5)) {
    std::ostringstream os;
    os << "eta must lie in (0, 1/2), got " << eta;
    throw DomainError(os.str());
  }
}

}  // namespace

TriMesh unit_annulus_mesh(double eta, const HoleShape& shape, int n_hole) {
  return mesh_annulus(Point::Zero(), 1.0, shape, eta, n_hole);
}

LiftResult lift_zero_on_hole(const PointVector& u, double eta, const HoleShape& shape, double p, int n_hole) {
  check_eta(eta);
  if (shape.max_radius() > 1.0) throw DomainError("lifting needs the model hole inside the unit ball");
  LiftResult out;
  out.mesh = share(unit_annulus_mesh(eta, shape, n_hole));
  out.velocity = interpolate_p2(*out.mesh, [&](const Point& x) { return Vec2((1.0 - lift_cutoff(x.norm(), eta)) * u(x)); });
  const Eigen::VectorXd plain = interpolate_p2(*out.mesh, u);
  out.grad_norm = lp_norm_gradient(*out.mesh, out.velocity, p).value;
  out.bound = lp_norm_gradient(*out.mesh, plain, p).value +
              std::pow(eta, 2.0 / p - 1.0) * lp_norm_velocity(*out.mesh, plain, p).value;
  out.ratio = out.bound > 0.0 ? out.grad_norm / out.bound : 0.0;
  out.cutoff_gradient_max = 1.5 / eta;
  return out;
}

LocalBogovskiiResult local_uniform_bogovskii(const ScalarField& f, double eta, const HoleShape& shape, double p,
                                             int n_hole) {
  check_eta(eta);
  LocalBogovskiiResult out;
  out.mesh = share(unit_annulus_mesh(eta, shape, n_hole));
  auto op = StokesOperator::make(out.mesh);
  out.solution = solve_prescribed_divergence(op, f, Dirichlet::zero(*out.mesh));
  out.grad_norm = lp_norm_gradient(*out.mesh, out.solution.velocity, p).value;
  out.f_norm = lp_norm(*out.mesh, f, p).value;
  out.ratio = out.f_norm > 0.0 ? out.grad_norm / out.f_norm : 0.0;
  return out;
}

UnitAnnulusCheck unit_annulus_consistency(const PerforatedMesh& pm, int k, const Eigen::VectorXd& u_full) {
  const CellSolve phys = solve_cell_problem(pm, k, u_full);
  const PerforatedDomain& pd = pm.domain();
  const double scale = pd.b1 * pd.epsilon();

  UnitAnnulusCheck out;
  out.eta = std::pow(pd.epsilon(), pd.alpha - 1.0);
  out.unit_mesh = share(transform_mesh(*pm.annulus_mesh(k), pd.centers.at(k), 1.0 / scale));
  if (out.unit_mesh->num_quadratic_nodes() != pm.annulus_mesh(k)->num_quadratic_nodes())
    throw Error("unit annulus mapping changed the node count");

  auto op = StokesOperator::make(out.unit_mesh);
  const auto u_local = std::make_shared<const Eigen::VectorXd>(phys.u_local);
  StokesSolution mapped;
  try {
    mapped = solve(local_system(op, u_local, scale * phys.hole_divergence, edge_tag::ball(k), edge_tag::hole(k)));
  } catch (const Error&) {
    rethrow_for_cell(k);
  }
  out.velocity_discrepancy = relative_max_difference(mapped.velocity, phys.solution.velocity);
  out.pressure_discrepancy =
      relative_max_difference(mapped.pressure, Eigen::VectorXd(scale * phys.solution.pressure));
  out.discrepancy = std::max(out.velocity_discrepancy, out.pressure_discrepancy);
  return out;
}

}  // namespace holelab
