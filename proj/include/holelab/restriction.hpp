#pragma once

#include "holelab/lp_norms.hpp"
#include "holelab/mesher.hpp"
#include "holelab/perforated_domain.hpp"
#include "holelab/stokes.hpp"

#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace holelab {

/// Two-level mesh of a perforated square: the mesh of all of D, its fluid
/// part D_eps, and one annulus submesh per cell. Operators are built on
/// first use and shared.
///
/// The pressure space on D is broken along the hole boundaries: class 0 is
/// D_eps and class k+1 is hole k.
class PerforatedMesh {
public:
  PerforatedMesh(PerforatedDomain pd, int n_hole = 16, double h_far = 0.25);

  const PerforatedDomain& domain() const { return pd_; }
  int n_hole() const { return n_hole_; }
  double epsilon() const { return pd_.epsilon(); }
  int num_cells() const { return pd_.num_cells(); }

  MeshPtr full() const { return full_; }
  MeshPtr fluid() const { return fluid_; }
  const SubMesh& fluid_submesh() const { return fluid_sub_; }
  const SubMesh& annulus(int k) const { return annuli_.at(k); }
  MeshPtr annulus_mesh(int k) const { return annulus_meshes_.at(k); }

  /// Fluid node of a node of D, or -1 inside a hole.
  int fluid_node(int full_node) const { return full_to_fluid_[full_node]; }
  /// Fluid triangle of a triangle of D, or -1 for hole triangles.
  int fluid_triangle(int full_triangle) const { return full_to_fluid_tri_[full_triangle]; }
  /// Nonzero on the triangles of D that belong to D_eps.
  const TriangleMask& fluid_mask() const { return fluid_mask_; }
  /// Area of the triangulated hole k.
  double hole_area(int k) const { return hole_area_.at(k); }

  std::shared_ptr<const PressureSpace> broken_pressure() const { return broken_; }
  /// Stokes operator on D with the broken pressure space.
  std::shared_ptr<const StokesOperator> full_operator() const;
  /// Stokes operator on D_eps with continuous pressure.
  std::shared_ptr<const StokesOperator> fluid_operator() const;
  /// Stokes operator on the annulus of cell k.
  std::shared_ptr<const StokesOperator> local_operator(int k) const;

  /// Copy of the coefficients of a P2 field on D at the nodes of D_eps.
  Eigen::VectorXd to_fluid(const Eigen::VectorXd& u_full) const;
  /// Zero extension of a P2 field on D_eps to D.
  Eigen::VectorXd from_fluid(const Eigen::VectorXd& u_fluid) const;
  /// Sets every node of the closed holes to zero.
  Eigen::VectorXd zero_on_holes(const Eigen::VectorXd& u_full) const;

private:
  PerforatedDomain pd_;
  int n_hole_;
  MeshPtr full_, fluid_;
  SubMesh fluid_sub_;
  std::vector<SubMesh> annuli_;
  std::vector<MeshPtr> annulus_meshes_;
  std::vector<int> full_to_fluid_, full_to_fluid_tri_;
  std::vector<char> closed_hole_node_;
  TriangleMask fluid_mask_;
  std::vector<double> hole_area_;
  std::shared_ptr<const PressureSpace> broken_;

  mutable std::mutex mutex_;
  mutable std::shared_ptr<const StokesOperator> full_op_, fluid_op_;
  mutable std::vector<std::shared_ptr<const StokesOperator>> local_ops_;
  mutable std::vector<std::unique_ptr<std::once_flag>> local_once_;
};

/// Local problem of one cell: -Lap u_k + grad p_k = -Lap u and
/// div u_k = div u + c_k on the annulus, u_k = u on the ball circle and 0
/// on the hole, with c_k = |annulus|^-1 int_{T_k} div u.
struct CellSolve {
  int cell = 0;
  Eigen::VectorXd u_local;  ///< u at the annulus nodes
  double hole_divergence = 0.0;  ///< c_k
  double compatibility_mismatch = 0.0;
  StokesSolution solution;
};

/// Throws the error of the local solve with the cell index prepended.
CellSolve solve_cell_problem(const PerforatedMesh& pm, int k, const Eigen::VectorXd& u_full);

/// (int_{T_k} div u)_k over the hole triangles of D.
std::vector<double> hole_divergence_integrals(const PerforatedMesh& pm, const Eigen::VectorXd& u_full);

struct RestrictionResult {
  Eigen::VectorXd velocity;  ///< P2 on D_eps
  std::vector<double> cell_mismatch;
  double max_mismatch = 0.0;
};

/// R_eps(u): u outside the balls, the local solutions inside the annuli.
/// u is a P2 field on D with zero trace on the outer boundary
/// (PreconditionError otherwise).
RestrictionResult restrict_field(const PerforatedMesh& pm, const Eigen::VectorXd& u_full);

/// ((d - p) alpha - d) / p. Throws DomainError unless 1 < p <= d.
double restriction_exponent(double p, int d, double alpha);

using PointVector = std::function<Vec2(const Point&)>;

struct RestrictionSample {
  double epsilon = 0.0;
  int field = 0;
  double grad_restricted = 0.0;  ///< ||grad R(u)||_p on D_eps
  double grad_u = 0.0;           ///< ||grad u||_p on D
  double u_norm = 0.0;           ///< ||u||_p on D
  double exponent = 0.0;
  double constant = 0.0;
};

struct RestrictionConstantTable {
  double p = 2.0;
  std::vector<RestrictionSample> samples;
  std::vector<std::string> notices;  ///< fields skipped as identically zero
  double band = 1.0;                 ///< max over fields of max/min of C across eps
  bool bounded = true;               ///< band <= band_threshold
  bool extrapolated = true;          ///< exponent outside d = 3
  double band_threshold = 1.5;
};

/// C = ||grad R(u)||_p / (||grad u||_p + eps^e ||u||_p) per mesh and field.
RestrictionConstantTable measure_restriction_constant(const std::vector<const PerforatedMesh*>& meshes,
                                                      const std::vector<PointVector>& fields, double p);

struct LiftResult {
  MeshPtr mesh;  ///< B_1 \ eta T
  Eigen::VectorXd velocity;
  double grad_norm = 0.0;   ///< ||grad L(u)||_p
  double bound = 0.0;       ///< ||grad u||_p + eta^(d/p - 1) ||u||_p on the annulus
  double ratio = 0.0;       ///< grad_norm / bound, 0 when bound = 0
  double cutoff_gradient_max = 0.0;
};

/// Cutoff theta_eta(r): 1 for r <= eta, smoothstep down to 0 at r = 2 eta.
double lift_cutoff(double r, double eta);
double lift_cutoff_derivative(double r, double eta);

/// L(u) = (1 - theta_eta) u interpolated on a mesh of B_1 \ eta T.
/// Throws DomainError unless 0 < eta < 1/2.
LiftResult lift_zero_on_hole(const PointVector& u, double eta, const HoleShape& shape, double p, int n_hole = 32);

struct LocalBogovskiiResult {
  MeshPtr mesh;
  StokesSolution solution;
  double grad_norm = 0.0;
  double f_norm = 0.0;
  double ratio = 0.0;  ///< 0 for f = 0
};

/// Zero-trace w on B_1 \ eta T with div w = f. Throws DomainError unless
/// 0 < eta < 1/2 and CompatibilityError when int f != 0.
LocalBogovskiiResult local_uniform_bogovskii(const ScalarField& f, double eta, const HoleShape& shape, double p,
                                             int n_hole = 32);
/// Mesh used by the two operations above.
TriMesh unit_annulus_mesh(double eta, const HoleShape& shape, int n_hole = 32);

struct UnitAnnulusCheck {
  double eta = 0.0;
  MeshPtr unit_mesh;
  double velocity_discrepancy = 0.0;
  double pressure_discrepancy = 0.0;
  double discrepancy = 0.0;
};

/// Solves the cell-k problem on the physical annulus and on its image under
/// y = (x - x_k) / (b1 eps), and compares the two under the scaling map.
UnitAnnulusCheck unit_annulus_consistency(const PerforatedMesh& pm, int k, const Eigen::VectorXd& u_full);

}  // namespace holelab
