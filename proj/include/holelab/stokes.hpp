#pragma once

#include "holelab/fe.hpp"
#include "holelab/fields.hpp"
#include "holelab/sparse_direct.hpp"

#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

namespace holelab {

/// Dirichlet data per boundary tag. Every boundary edge of the mesh must
/// carry a tag present here.
struct Dirichlet {
  /// Value at P2 node `node` located at x.
  using NodalData = std::function<Vec2(int node, const Point& x)>;
  std::map<int, NodalData> by_tag;

  /// Zero data on every boundary tag of the mesh.
  static Dirichlet zero(const TriMesh& mesh);
  Dirichlet& set(int tag, NodalData data);
  Dirichlet& set_function(int tag, std::function<Vec2(const Point&)> f);
};

/// Right-hand side of the momentum equation; terms are summed.
struct StokesRhs {
  std::optional<TensorField> div_form;                  ///< -int G : grad phi  (source div G)
  std::optional<VectorField> body_force;                ///< int f . phi
  std::shared_ptr<const Eigen::VectorXd> laplacian_of;  ///< int grad u : grad phi, u in P2 on this mesh

  static StokesRhs zero() { return {}; }
  static StokesRhs divergence_of(TensorField G) {
    StokesRhs r;
    r.div_form = std::move(G);
    return r;
  }
};

struct AssemblyOptions {
  int matrix_degree = 4;
  int rhs_degree = 6;  ///< overridden by the degree of a table source
  double compatibility_tolerance = 1e-8;
};

/// Matrices of the P2-P1 Stokes problem with Dirichlet conditions on the
/// whole boundary, plus a lazily computed factorization of the saddle
/// system
///   [A_ff  B_f^T  0] [u_f]   [F_f - A_fd u_d]
///   [B_f   0      m] [p  ] = [g   - B_d  u_d]
///   [0     m^T    0] [lam]   [0             ]
/// where B_qi = -int q div phi_i and m_q = int q.
class StokesOperator {
public:
  StokesOperator(MeshPtr mesh, std::shared_ptr<const PressureSpace> pressure, int matrix_degree = 4);

  static std::shared_ptr<const StokesOperator> make(MeshPtr mesh);  ///< continuous pressure
  static std::shared_ptr<const StokesOperator> make(MeshPtr mesh, std::shared_ptr<const PressureSpace> pressure);

  const TriMesh& mesh() const { return *mesh_; }
  MeshPtr mesh_ptr() const { return mesh_; }
  const PressureSpace& pressure_space() const { return *pressure_; }
  std::shared_ptr<const PressureSpace> pressure_ptr() const { return pressure_; }

  int velocity_size() const { return 2 * mesh_->num_quadratic_nodes(); }
  int pressure_size() const { return pressure_->size(); }
  int num_free() const { return num_free_; }
  int system_size() const { return num_free_ + pressure_size() + 1; }

  const SparseMatrix& stiffness() const { return A_; }   ///< full vector Laplacian
  const SparseMatrix& divergence() const { return B_; }  ///< full B
  const Eigen::VectorXd& pressure_mass() const { return m_; }
  const SparseMatrix& saddle_matrix() const { return K_; }
  /// Reduced index of a velocity dof, or -1 for Dirichlet dofs.
  int free_index(int dof) const { return free_index_[dof]; }
  const std::vector<int>& boundary_nodes() const { return boundary_nodes_; }

  /// Factorization, computed once on first use (thread-safe).
  const SparseLU& factor() const;

private:
  MeshPtr mesh_;
  std::shared_ptr<const PressureSpace> pressure_;
  SparseMatrix A_, B_, K_;
  Eigen::VectorXd m_;
  std::vector<int> free_index_;
  std::vector<int> boundary_nodes_;
  int num_free_ = 0;
  mutable std::once_flag factor_once_;
  mutable std::unique_ptr<SparseLU> factor_;
};

struct SaddleSystem {
  std::shared_ptr<const StokesOperator> op;
  Eigen::VectorXd rhs;           ///< reduced right-hand side
  Eigen::VectorXd boundary;      ///< full velocity vector holding Dirichlet values
  Eigen::VectorXd load;          ///< full momentum load F
  Eigen::VectorXd div_moments;   ///< g_q = -int q f
  double compatibility_mismatch = 0.0;  ///< relative
};

struct StokesSolution {
  MeshPtr mesh;
  std::shared_ptr<const PressureSpace> pressure_space;
  Eigen::VectorXd velocity;  ///< P2, interleaved components
  Eigen::VectorXd pressure;  ///< P1 (possibly broken)
  double multiplier = 0.0;
  double pressure_mean = 0.0;
  double residual = 0.0;  ///< relative residual of the saddle system

  int dofs() const { return static_cast<int>(velocity.size() + pressure.size()); }
};

/// Builds the right-hand side. Throws CompatibilityError when
/// int div_data != net boundary flux of the Dirichlet data (relative to
/// the sum of absolute contributions), ConfigError for unknown tags.
SaddleSystem assemble(std::shared_ptr<const StokesOperator> op, const StokesRhs& rhs, const ScalarField* div_data,
                      const Dirichlet& dirichlet, const AssemblyOptions& options = {});
SaddleSystem assemble(MeshPtr mesh, const StokesRhs& rhs, const ScalarField* div_data, const Dirichlet& dirichlet,
                      const AssemblyOptions& options = {});

StokesSolution solve(const SaddleSystem& system);

/// Stokes solve with zero momentum source and div w = f.
StokesSolution solve_prescribed_divergence(std::shared_ptr<const StokesOperator> op, const ScalarField& f,
                                           const Dirichlet& dirichlet);

/// Zero-trace solve with momentum source div G. When the energy audit is
/// on, ||grad v||_2 <= ||G||_2 is checked on the right-hand-side rule.
StokesSolution solve_div_form(std::shared_ptr<const StokesOperator> op, const TensorField& G,
                              const AssemblyOptions& options = {});

struct EnergyAudit {
  long solves = 0;
  long violations = 0;           ///< ||grad v||_2 > ||G||_2 + 1e-9
  double worst_excess = -1e300;  ///< max of ||grad v||_2 - ||G||_2
};
void set_energy_audit(bool enabled);
EnergyAudit energy_audit();
void reset_energy_audit();

/// Velocity and pressure at x. Throws DomainError outside the mesh.
std::pair<Vec2, double> evaluate_at(const StokesSolution& solution, const Point& x);

/// (int q_i div w)_i over the pressure basis.
Eigen::VectorXd divergence_moments(const TriMesh& mesh, const PressureSpace& space, const Eigen::VectorXd& w,
                                   int degree = 4);
/// (int q_i f)_i over the pressure basis.
Eigen::VectorXd field_moments(const TriMesh& mesh, const PressureSpace& space, const ScalarField& f, int degree = 6);
/// (int q_i |grad w|_F)_i, the scale used to normalize divergence residuals.
Eigen::VectorXd gradient_moments(const TriMesh& mesh, const PressureSpace& space, const Eigen::VectorXd& w,
                                 int degree = 6);

/// ||(int q_i div w)|| / ||(int q_i |grad w|)||, 0 for w = 0.
double relative_divergence_residual(const TriMesh& mesh, const PressureSpace& space, const Eigen::VectorXd& w);

/// Net flux of the P2 interpolant of the Dirichlet data through the boundary.
double boundary_flux(const TriMesh& mesh, const Eigen::VectorXd& boundary_velocity);

/// `stokes v1 <nv> <np> <mesh checksum hex>` then the velocity and
/// pressure coefficients, one per line.
void write_solution(std::ostream& os, const StokesSolution& s);
StokesSolution read_solution(std::istream& is, MeshPtr mesh, std::shared_ptr<const PressureSpace> space);

}  // namespace holelab
