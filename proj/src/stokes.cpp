#include "holelab/stokes.hpp"

#include "holelab/errors.hpp"
#include "holelab/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace holelab {

namespace {

using Triplets = std::vector<Eigen::Triplet<double, int>>;

/// Runs f(t) over triangles in deterministic chunks.
template <class F>
void for_triangles(const TriMesh& mesh, F&& f) {
  const int nt = mesh.num_triangles();
  parallel_chunks(nt, default_chunks(nt), [&](int, int b, int e) {
    for (int t = b; t < e; ++t) f(t);
  });
}

/// Outward unit normal times length for boundary edge e, plus its endpoints
/// in the orientation of the adjacent triangle.
struct BoundaryEdge {
  int a, b, mid;
  Vec2 normal;  // outward, length = edge length
};

BoundaryEdge oriented_boundary_edge(const TriMesh& mesh, int e) {
  const int t = mesh.edge_triangles(e)[0];
  const auto& tri = mesh.triangles[t];
  const auto& te = mesh.triangle_edges(t);
  int local = 0;
  while (te[local] != e) ++local;
  const int a = tri[local];
  const int b = tri[(local + 1) % 3];
  const Vec2 d = mesh.vertices[b] - mesh.vertices[a];
  return {a, b, mesh.num_vertices() + e, Vec2(d.y(), -d.x())};
}

int effective_degree(std::optional<int> table_degree, int fallback) { return table_degree ? *table_degree : fallback; }

/// Per-triangle local pressure moments (int psi_q g) merged in triangle order.
template <class G>
Eigen::VectorXd pressure_moments(const TriMesh& mesh, const PressureSpace& space, int degree, G&& g) {
  const QuadRule& rule = triangle_rule(degree);
  std::vector<std::array<double, 3>> local(mesh.num_triangles());
  for_triangles(mesh, [&](int t) {
    const double area = mesh.triangle_area(t);
    std::array<double, 3> acc{0, 0, 0};
    for (int i = 0; i < rule.size(); ++i) {
      const auto& l = rule.bary[i];
      QuadPoint q{t, i, degree, map_to_triangle(mesh, t, l), l};
      const double v = g(q) * area * rule.weights[i];
      for (int k = 0; k < 3; ++k) acc[k] += v * l[k];
    }
    local[t] = acc;
  });
  Eigen::VectorXd out = Eigen::VectorXd::Zero(space.size());
  for (int t = 0; t < mesh.num_triangles(); ++t)
    for (int k = 0; k < 3; ++k) out[space.dofs(t)[k]] += local[t][k];
  return out;
}

}  // namespace

Dirichlet Dirichlet::zero(const TriMesh& mesh) {
  Dirichlet d;
  for (int e : mesh.boundary_edges()) {
    const auto tag = mesh.edge_tag_of(e);
    if (!tag) throw ConfigError("boundary edge " + std::to_string(e) + " has no tag");
    d.by_tag[*tag] = [](int, const Point&) { return Vec2(Vec2::Zero()); };
  }
  return d;
}

Dirichlet& Dirichlet::set(int tag, NodalData data) {
  by_tag[tag] = std::move(data);
  return *this;
}

Dirichlet& Dirichlet::set_function(int tag, std::function<Vec2(const Point&)> f) {
  by_tag[tag] = [f = std::move(f)](int, const Point& x) { return f(x); };
  return *this;
}

StokesOperator::StokesOperator(MeshPtr mesh, std::shared_ptr<const PressureSpace> pressure, int matrix_degree)
    : mesh_(std::move(mesh)), pressure_(std::move(pressure)) {
  if (!mesh_ || !mesh_->finalized()) throw PreconditionError("Stokes operator needs a finalized mesh");
  if (!pressure_) pressure_ = std::make_shared<const PressureSpace>(PressureSpace::continuous(*mesh_));
  const TriMesh& m = *mesh_;
  const int nn = m.num_quadratic_nodes();
  const int nv = 2 * nn;
  const int np = pressure_->size();

  std::vector<char> on_boundary(nn, 0);
  for (int e : m.boundary_edges()) {
    const auto& ed = m.edges()[e];
    on_boundary[ed[0]] = on_boundary[ed[1]] = on_boundary[m.num_vertices() + e] = 1;
  }
  for (int i = 0; i < nn; ++i)
    if (on_boundary[i]) boundary_nodes_.push_back(i);
  free_index_.assign(nv, -1);
  for (int i = 0; i < nn; ++i)
    if (!on_boundary[i])
      for (int c = 0; c < 2; ++c) free_index_[2 * i + c] = num_free_++;

  const QuadRule& rule = triangle_rule(matrix_degree);
  const int nt = m.num_triangles();
  const int chunks = default_chunks(nt);
  std::vector<Triplets> a_parts(chunks), b_parts(chunks);
  std::vector<std::array<double, 3>> mass_local(nt);
  parallel_chunks(nt, chunks, [&](int chunk, int begin, int end) {
    auto& at = a_parts[chunk];
    auto& bt = b_parts[chunk];
    at.reserve(static_cast<std::size_t>(end - begin) * 72);
    bt.reserve(static_cast<std::size_t>(end - begin) * 36);
    for (int t = begin; t < end; ++t) {
      const double area = m.triangle_area(t);
      const auto gl = barycentric_gradients(m, t);
      const auto nodes = p2_nodes(m, t);
      const auto& pd = pressure_->dofs(t);
      Eigen::Matrix<double, 6, 6> K = Eigen::Matrix<double, 6, 6>::Zero();
      double Bl[3][6][2] = {};
      std::array<double, 3> ml{0, 0, 0};
      for (int q = 0; q < rule.size(); ++q) {
        const auto& l = rule.bary[q];
        const double w = area * rule.weights[q];
        const auto g = p2_gradients(l, gl);
        for (int i = 0; i < 6; ++i)
          for (int j = 0; j < 6; ++j) K(i, j) += w * g[i].dot(g[j]);
        for (int k = 0; k < 3; ++k) {
          ml[k] += w * l[k];
          for (int i = 0; i < 6; ++i)
            for (int c = 0; c < 2; ++c) Bl[k][i][c] -= w * l[k] * g[i][c];
        }
      }
      for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j)
          for (int c = 0; c < 2; ++c) at.emplace_back(2 * nodes[i] + c, 2 * nodes[j] + c, K(i, j));
      for (int k = 0; k < 3; ++k)
        for (int i = 0; i < 6; ++i)
          for (int c = 0; c < 2; ++c) bt.emplace_back(pd[k], 2 * nodes[i] + c, Bl[k][i][c]);
      mass_local[t] = ml;
    }
  });
  Triplets at, bt;
  for (auto& p : a_parts) at.insert(at.end(), p.begin(), p.end());
  for (auto& p : b_parts) bt.insert(bt.end(), p.begin(), p.end());
  A_.resize(nv, nv);
  A_.setFromTriplets(at.begin(), at.end());
  B_.resize(np, nv);
  B_.setFromTriplets(bt.begin(), bt.end());
  m_ = Eigen::VectorXd::Zero(np);
  for (int t = 0; t < nt; ++t)
    for (int k = 0; k < 3; ++k) m_[pressure_->dofs(t)[k]] += mass_local[t][k];

  // reduced saddle matrix
  const int nf = num_free_;
  Triplets kt;
  kt.reserve(A_.nonZeros() + 2 * B_.nonZeros() + 2 * np);
  for (int col = 0; col < A_.outerSize(); ++col) {
    const int fc = free_index_[col];
    if (fc < 0) continue;
    for (SparseMatrix::InnerIterator it(A_, col); it; ++it) {
      const int fr = free_index_[it.row()];
      if (fr >= 0) kt.emplace_back(fr, fc, it.value());
    }
    for (SparseMatrix::InnerIterator it(B_, col); it; ++it) {
      kt.emplace_back(nf + it.row(), fc, it.value());
      kt.emplace_back(fc, nf + it.row(), it.value());
    }
  }
  for (int q = 0; q < np; ++q) {
    kt.emplace_back(nf + q, nf + np, m_[q]);
    kt.emplace_back(nf + np, nf + q, m_[q]);
  }
  K_.resize(nf + np + 1, nf + np + 1);
  K_.setFromTriplets(kt.begin(), kt.end());
  K_.makeCompressed();
}

std::shared_ptr<const StokesOperator> StokesOperator::make(MeshPtr mesh) {
  return std::make_shared<const StokesOperator>(std::move(mesh), nullptr);
}

std::shared_ptr<const StokesOperator> StokesOperator::make(MeshPtr mesh, std::shared_ptr<const PressureSpace> pressure) {
  return std::make_shared<const StokesOperator>(std::move(mesh), std::move(pressure));
}

const SparseLU& StokesOperator::factor() const {
  std::call_once(factor_once_, [this] { factor_ = std::make_unique<SparseLU>(K_); });
  return *factor_;
}

double boundary_flux(const TriMesh& mesh, const Eigen::VectorXd& u) {
  double flux = 0.0;
  for (int e : mesh.boundary_edges()) {
    const BoundaryEdge be = oriented_boundary_edge(mesh, e);
    const Vec2 ua(u[2 * be.a], u[2 * be.a + 1]);
    const Vec2 ub(u[2 * be.b], u[2 * be.b + 1]);
    const Vec2 um(u[2 * be.mid], u[2 * be.mid + 1]);
    flux += (ua + 4.0 * um + ub).dot(be.normal) / 6.0;
  }
  return flux;
}

SaddleSystem assemble(std::shared_ptr<const StokesOperator> op, const StokesRhs& rhs, const ScalarField* div_data,
                      const Dirichlet& dirichlet, const AssemblyOptions& options) {
  if (!op) throw PreconditionError("assemble needs an operator");
  const TriMesh& m = op->mesh();
  const int nv = op->velocity_size();
  const int np = op->pressure_size();
  const int nf = op->num_free();

  SaddleSystem sys;
  sys.op = op;

  // Dirichlet values
  std::set<int> present;
  for (int e : m.boundary_edges()) {
    const auto tag = m.edge_tag_of(e);
    if (!tag) throw ConfigError("boundary edge " + std::to_string(e) + " has no tag");
    present.insert(*tag);
  }
  for (const auto& [tag, f] : dirichlet.by_tag)
    if (!present.count(tag)) throw ConfigError("Dirichlet data for unknown boundary tag " + std::to_string(tag));
  sys.boundary = Eigen::VectorXd::Zero(nv);
  std::vector<char> done(m.num_quadratic_nodes(), 0);
  for (int e : m.boundary_edges()) {
    const int tag = *m.edge_tag_of(e);
    const auto it = dirichlet.by_tag.find(tag);
    if (it == dirichlet.by_tag.end()) throw ConfigError("no Dirichlet data for boundary tag " + std::to_string(tag));
    const auto& ed = m.edges()[e];
    for (int node : {ed[0], ed[1], m.num_vertices() + e}) {
      if (done[node]) continue;
      done[node] = 1;
      const Vec2 v = it->second(node, m.node(node));
      sys.boundary[2 * node] = v.x();
      sys.boundary[2 * node + 1] = v.y();
    }
  }

  // momentum load
  sys.load = Eigen::VectorXd::Zero(nv);
  std::vector<std::array<double, 12>> local(m.num_triangles());
  auto add_local = [&] {
    for (int t = 0; t < m.num_triangles(); ++t) {
      const auto nodes = p2_nodes(m, t);
      for (int i = 0; i < 6; ++i)
        for (int c = 0; c < 2; ++c) sys.load[2 * nodes[i] + c] += local[t][2 * i + c];
    }
  };
  if (rhs.div_form && !rhs.div_form->is_zero()) {
    const TensorField& G = *rhs.div_form;
    G.check_mesh(m);
    const int degree = effective_degree(G.table_degree(), options.rhs_degree);
    const QuadRule& rule = triangle_rule(degree);
    for_triangles(m, [&](int t) {
      const double area = m.triangle_area(t);
      const auto gl = barycentric_gradients(m, t);
      std::array<double, 12> acc{};
      for (int q = 0; q < rule.size(); ++q) {
        const auto& l = rule.bary[q];
        const Mat2 g = G(QuadPoint{t, q, degree, map_to_triangle(m, t, l), l});
        const double w = area * rule.weights[q];
        const auto grads = p2_gradients(l, gl);
        for (int i = 0; i < 6; ++i)
          for (int c = 0; c < 2; ++c) acc[2 * i + c] -= w * g.row(c).dot(grads[i]);
      }
      local[t] = acc;
    });
    add_local();
  }
  if (rhs.body_force && !rhs.body_force->is_zero()) {
    const VectorField& f = *rhs.body_force;
    f.check_mesh(m);
    const int degree = effective_degree(f.table_degree(), options.rhs_degree);
    const QuadRule& rule = triangle_rule(degree);
    for_triangles(m, [&](int t) {
      const double area = m.triangle_area(t);
      std::array<double, 12> acc{};
      for (int q = 0; q < rule.size(); ++q) {
        const auto& l = rule.bary[q];
        const Vec2 v = f(QuadPoint{t, q, degree, map_to_triangle(m, t, l), l});
        const double w = area * rule.weights[q];
        const auto phi = p2_values(l);
        for (int i = 0; i < 6; ++i)
          for (int c = 0; c < 2; ++c) acc[2 * i + c] += w * phi[i] * v[c];
      }
      local[t] = acc;
    });
    add_local();
  }
  if (rhs.laplacian_of) {
    if (rhs.laplacian_of->size() != nv) throw PreconditionError("laplacian_of has the wrong length");
    sys.load += op->stiffness() * *rhs.laplacian_of;
  }

  // divergence datum and compatibility
  sys.div_moments = Eigen::VectorXd::Zero(np);
  double integral = 0.0, scale = 0.0;
  if (div_data && !div_data->is_zero()) {
    div_data->check_mesh(m);
    const int degree = effective_degree(div_data->table_degree(), options.rhs_degree);
    Eigen::VectorXd absm = pressure_moments(m, op->pressure_space(), degree, [&](const QuadPoint& q) {
      return std::abs((*div_data)(q));
    });
    sys.div_moments = -pressure_moments(m, op->pressure_space(), degree, [&](const QuadPoint& q) { return (*div_data)(q); });
    integral = -sys.div_moments.sum();
    scale += absm.sum();
  }
  double flux = 0.0;
  for (int e : m.boundary_edges()) {
    const BoundaryEdge be = oriented_boundary_edge(m, e);
    const auto& u = sys.boundary;
    const Vec2 s = Vec2(u[2 * be.a], u[2 * be.a + 1]) + 4.0 * Vec2(u[2 * be.mid], u[2 * be.mid + 1]) +
                   Vec2(u[2 * be.b], u[2 * be.b + 1]);
    const double fe = s.dot(be.normal) / 6.0;
    flux += fe;
    scale += std::abs(fe);
  }
  sys.compatibility_mismatch = scale > 0 ? std::abs(integral - flux) / scale : 0.0;
  if (sys.compatibility_mismatch > options.compatibility_tolerance) {
    std::ostringstream os;
    os << "divergence datum integrates to " << integral << " but the boundary flux is " << flux
       << " (relative mismatch " << sys.compatibility_mismatch << ")";
    throw CompatibilityError(os.str(), sys.compatibility_mismatch);
  }

  // reduced right-hand side
  const Eigen::VectorXd Au = op->stiffness() * sys.boundary;
  const Eigen::VectorXd Bu = op->divergence() * sys.boundary;
  sys.rhs = Eigen::VectorXd::Zero(nf + np + 1);
  for (int d = 0; d < nv; ++d) {
    const int f = op->free_index(d);
    if (f >= 0) sys.rhs[f] = sys.load[d] - Au[d];
  }
  sys.rhs.segment(nf, np) = sys.div_moments - Bu;
  return sys;
}

SaddleSystem assemble(MeshPtr mesh, const StokesRhs& rhs, const ScalarField* div_data, const Dirichlet& dirichlet,
                      const AssemblyOptions& options) {
  auto op = std::make_shared<const StokesOperator>(std::move(mesh), nullptr, options.matrix_degree);
  return assemble(op, rhs, div_data, dirichlet, options);
}

StokesSolution solve(const SaddleSystem& sys) {
  const StokesOperator& op = *sys.op;
  const int nf = op.num_free();
  const int np = op.pressure_size();
  const Eigen::VectorXd x = op.factor().solve(sys.rhs);
  const double bnorm = sys.rhs.norm();
  const double rnorm = (op.saddle_matrix() * x - sys.rhs).norm();
  const double residual = bnorm > 0 ? rnorm / bnorm : rnorm;
  if (!(residual <= 1e-9)) {
    std::ostringstream os;
    os << "saddle system residual " << residual << " exceeds 1e-9 (pivot rcond " << op.factor().rcond() << ")";
    throw SolverError(os.str());
  }
  StokesSolution s;
  s.mesh = op.mesh_ptr();
  s.pressure_space = op.pressure_ptr();
  s.velocity = sys.boundary;
  for (int d = 0; d < op.velocity_size(); ++d) {
    const int f = op.free_index(d);
    if (f >= 0) s.velocity[d] = x[f];
  }
  s.pressure = x.segment(nf, np);
  s.multiplier = x[nf + np];
  const double total = op.pressure_mass().sum();
  s.pressure_mean = total > 0 ? op.pressure_mass().dot(s.pressure) / total : 0.0;
  s.residual = residual;
  return s;
}

StokesSolution solve_prescribed_divergence(std::shared_ptr<const StokesOperator> op, const ScalarField& f,
                                           const Dirichlet& dirichlet) {
  return solve(assemble(std::move(op), StokesRhs::zero(), &f, dirichlet));
}

namespace {
std::atomic<bool> audit_enabled{false};
std::mutex audit_mutex;
EnergyAudit audit_state;
}  // namespace

void set_energy_audit(bool enabled) { audit_enabled = enabled; }

EnergyAudit energy_audit() {
  std::lock_guard<std::mutex> lock(audit_mutex);
  return audit_state;
}

void reset_energy_audit() {
  std::lock_guard<std::mutex> lock(audit_mutex);
  audit_state = EnergyAudit{};
}

StokesSolution solve_div_form(std::shared_ptr<const StokesOperator> op, const TensorField& G,
                              const AssemblyOptions& options) {
  const TriMesh& m = op->mesh();
  StokesSolution s = solve(assemble(op, StokesRhs::divergence_of(G), nullptr, Dirichlet::zero(m), options));
  if (audit_enabled) {
    const int degree = effective_degree(G.table_degree(), options.rhs_degree);
    double gv = 0.0, gg = 0.0;
    for_each_quad_point(m, degree, [&](const QuadPoint& q, double w) {
      gv += w * p2_gradient(m, s.velocity, q.triangle, q.bary).squaredNorm();
      gg += w * G(q).squaredNorm();
    });
    const double excess = std::sqrt(gv) - std::sqrt(gg);
    std::lock_guard<std::mutex> lock(audit_mutex);
    ++audit_state.solves;
    if (excess > 1e-9) ++audit_state.violations;
    audit_state.worst_excess = std::max(audit_state.worst_excess, excess);
  }
  return s;
}

std::pair<Vec2, double> evaluate_at(const StokesSolution& s, const Point& x) {
  const auto hit = s.mesh->locate(x, 1e-10);
  if (!hit) {
    std::ostringstream os;
    os << "point (" << x.x() << ", " << x.y() << ") lies outside the mesh";
    throw DomainError(os.str());
  }
  const auto& [t, l] = *hit;
  return {p2_value(*s.mesh, s.velocity, t, l), p1_value(*s.pressure_space, s.pressure, t, l)};
}

Eigen::VectorXd divergence_moments(const TriMesh& mesh, const PressureSpace& space, const Eigen::VectorXd& w,
                                   int degree) {
  return pressure_moments(mesh, space, degree, [&](const QuadPoint& q) {
    return p2_gradient(mesh, w, q.triangle, q.bary).trace();
  });
}

Eigen::VectorXd field_moments(const TriMesh& mesh, const PressureSpace& space, const ScalarField& f, int degree) {
  f.check_mesh(mesh);
  const int d = effective_degree(f.table_degree(), degree);
  return pressure_moments(mesh, space, d, [&](const QuadPoint& q) { return f(q); });
}

Eigen::VectorXd gradient_moments(const TriMesh& mesh, const PressureSpace& space, const Eigen::VectorXd& w,
                                 int degree) {
  return pressure_moments(mesh, space, degree, [&](const QuadPoint& q) {
    return p2_gradient(mesh, w, q.triangle, q.bary).norm();
  });
}

double relative_divergence_residual(const TriMesh& mesh, const PressureSpace& space, const Eigen::VectorXd& w) {
  const double den = gradient_moments(mesh, space, w).norm();
  if (den == 0.0) return 0.0;
  return divergence_moments(mesh, space, w).norm() / den;
}

void write_solution(std::ostream& os, const StokesSolution& s) {
  os << "stokes v1 " << s.velocity.size() << ' ' << s.pressure.size() << ' ' << std::hex << s.mesh->checksum()
     << std::dec << '\n';
  os << std::setprecision(17);
  for (Eigen::Index i = 0; i < s.velocity.size(); ++i) os << s.velocity[i] << '\n';
  for (Eigen::Index i = 0; i < s.pressure.size(); ++i) os << s.pressure[i] << '\n';
  os << "multiplier " << s.multiplier << '\n';
}

StokesSolution read_solution(std::istream& is, MeshPtr mesh, std::shared_ptr<const PressureSpace> space) {
  std::string magic, version;
  long nv = 0, np = 0;
  std::uint64_t checksum = 0;
  if (!(is >> magic >> version >> nv >> np >> std::hex >> checksum >> std::dec) || magic != "stokes" ||
      version != "v1")
    throw ConfigError("not a 'stokes v1' solution file");
  if (checksum != mesh->checksum()) throw ConfigError("solution file belongs to a different mesh");
  if (!space) space = std::make_shared<const PressureSpace>(PressureSpace::continuous(*mesh));
  if (nv != 2L * mesh->num_quadratic_nodes() || np != space->size())
    throw ConfigError("solution file sizes do not match the mesh");
  StokesSolution s;
  s.mesh = mesh;
  s.pressure_space = space;
  s.velocity.resize(nv);
  s.pressure.resize(np);
  for (long i = 0; i < nv; ++i)
    if (!(is >> s.velocity[i])) throw ConfigError("truncated solution file");
  for (long i = 0; i < np; ++i)
    if (!(is >> s.pressure[i])) throw ConfigError("truncated solution file");
  std::string key;
  if (!(is >> key >> s.multiplier) || key != "multiplier") throw ConfigError("solution file lacks the multiplier");
  return s;
}

}  // namespace holelab
