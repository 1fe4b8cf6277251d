#pragma once

#include "holelab/fields.hpp"

#include <Eigen/Dense>

#include <array>
#include <functional>
#include <vector>

namespace holelab {

/// Continuous quadratic (P2) scalar nodes are the mesh vertices followed by
/// the edge midpoints; vector coefficients are interleaved, 2*node + c.
///
/// Local P2 numbering: vertices 0..2, then local edges 0 = (v0,v1),
/// 1 = (v1,v2), 2 = (v2,v0).
std::array<int, 6> p2_nodes(const TriMesh& mesh, int t);

/// Gradients of the barycentric coordinates of triangle t.
std::array<Vec2, 3> barycentric_gradients(const TriMesh& mesh, int t);

std::array<double, 6> p2_values(const std::array<double, 3>& l);
std::array<Vec2, 6> p2_gradients(const std::array<double, 3>& l, const std::array<Vec2, 3>& grad_l);

/// Linear (P1) pressure space: continuous inside each label class and
/// independent across classes. With a single class it is the usual
/// continuous P1 space.
class PressureSpace {
public:
  static PressureSpace continuous(const TriMesh& mesh);
  /// labels[t] selects the class of triangle t.
  static PressureSpace broken(const TriMesh& mesh, const std::vector<int>& labels);

  int size() const { return static_cast<int>(dof_vertex_.size()); }
  const std::array<int, 3>& dofs(int t) const { return tri_dofs_[t]; }
  int dof_vertex(int i) const { return dof_vertex_[i]; }
  int dof_label(int i) const { return dof_label_[i]; }
  bool is_broken() const { return broken_; }

private:
  std::vector<std::array<int, 3>> tri_dofs_;
  std::vector<int> dof_vertex_;
  std::vector<int> dof_label_;
  bool broken_ = false;
};

/// Nodal interpolation of a vector function into P2 coefficients.
Eigen::VectorXd interpolate_p2(const TriMesh& mesh, const std::function<Vec2(const Point&)>& f);

Vec2 p2_value(const TriMesh& mesh, const Eigen::VectorXd& coef, int t, const std::array<double, 3>& l);
/// (grad u)_ij = d u_i / d x_j
Mat2 p2_gradient(const TriMesh& mesh, const Eigen::VectorXd& coef, int t, const std::array<double, 3>& l);
double p1_value(const PressureSpace& space, const Eigen::VectorXd& coef, int t, const std::array<double, 3>& l);

/// Finite-element fields as quadrature-point fields on their mesh.
VectorField p2_field(MeshPtr mesh, std::shared_ptr<const Eigen::VectorXd> coef, std::string label = "P2 field");
TensorField p2_gradient_field(MeshPtr mesh, std::shared_ptr<const Eigen::VectorXd> coef,
                              std::string label = "P2 gradient");
ScalarField p2_divergence_field(MeshPtr mesh, std::shared_ptr<const Eigen::VectorXd> coef,
                                std::string label = "P2 divergence");
ScalarField p1_field(std::shared_ptr<const PressureSpace> space, std::shared_ptr<const Eigen::VectorXd> coef,
                     std::string label = "P1 field");

}  // namespace holelab
