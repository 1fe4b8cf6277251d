#include "holelab/fe.hpp"

#include <map>

namespace holelab {

std::array<int, 6> p2_nodes(const TriMesh& mesh, int t) {
  const auto& tri = mesh.triangles[t];
  const auto& te = mesh.triangle_edges(t);
  const int nv = mesh.num_vertices();
  return {tri[0], tri[1], tri[2], nv + te[0], nv + te[1], nv + te[2]};
}

std::array<Vec2, 3> barycentric_gradients(const TriMesh& mesh, int t) {
  const auto& tri = mesh.triangles[t];
  const Point& a = mesh.vertices[tri[0]];
  const Point& b = mesh.vertices[tri[1]];
  const Point& c = mesh.vertices[tri[2]];
  const double det = (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
  // grad lambda_i = rot90(opposite edge) / det
  return {Vec2((b.y() - c.y()) / det, (c.x() - b.x()) / det), Vec2((c.y() - a.y()) / det, (a.x() - c.x()) / det),
          Vec2((a.y() - b.y()) / det, (b.x() - a.x()) / det)};
}

std::array<double, 6> p2_values(const std::array<double, 3>& l) {
  return {l[0] * (2.0 * l[0] - 1.0), l[1] * (2.0 * l[1] - 1.0), l[2] * (2.0 * l[2] - 1.0),
          4.0 * l[0] * l[1],         4.0 * l[1] * l[2],         4.0 * l[2] * l[0]};
}

std::array<Vec2, 6> p2_gradients(const std::array<double, 3>& l, const std::array<Vec2, 3>& g) {
  return {(4.0 * l[0] - 1.0) * g[0],          (4.0 * l[1] - 1.0) * g[1],          (4.0 * l[2] - 1.0) * g[2],
          4.0 * (l[0] * g[1] + l[1] * g[0]), 4.0 * (l[1] * g[2] + l[2] * g[1]), 4.0 * (l[2] * g[0] + l[0] * g[2])};
}

PressureSpace PressureSpace::continuous(const TriMesh& mesh) {
  PressureSpace s;
  s.tri_dofs_ = mesh.triangles;
  s.dof_vertex_.resize(mesh.num_vertices());
  s.dof_label_.assign(mesh.num_vertices(), 0);
  for (int v = 0; v < mesh.num_vertices(); ++v) s.dof_vertex_[v] = v;
  return s;
}

PressureSpace PressureSpace::broken(const TriMesh& mesh, const std::vector<int>& labels) {
  PressureSpace s;
  s.broken_ = true;
  s.tri_dofs_.resize(mesh.num_triangles());
  std::map<std::pair<int, int>, int> index;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    for (int j = 0; j < 3; ++j) {
      const int v = mesh.triangles[t][j];
      auto [it, inserted] = index.emplace(std::make_pair(labels[t], v), s.size());
      if (inserted) {
        s.dof_vertex_.push_back(v);
        s.dof_label_.push_back(labels[t]);
      }
      s.tri_dofs_[t][j] = it->second;
    }
  }
  return s;
}

Eigen::VectorXd interpolate_p2(const TriMesh& mesh, const std::function<Vec2(const Point&)>& f) {
  const int n = mesh.num_quadratic_nodes();
  Eigen::VectorXd c(2 * n);
  for (int i = 0; i < n; ++i) {
    const Vec2 v = f(mesh.node(i));
    c[2 * i] = v.x();
    c[2 * i + 1] = v.y();
  }
  return c;
}

Vec2 p2_value(const TriMesh& mesh, const Eigen::VectorXd& coef, int t, const std::array<double, 3>& l) {
  const auto nodes = p2_nodes(mesh, t);
  const auto phi = p2_values(l);
  Vec2 u = Vec2::Zero();
  for (int i = 0; i < 6; ++i) u += phi[i] * Vec2(coef[2 * nodes[i]], coef[2 * nodes[i] + 1]);
  return u;
}

Mat2 p2_gradient(const TriMesh& mesh, const Eigen::VectorXd& coef, int t, const std::array<double, 3>& l) {
  const auto nodes = p2_nodes(mesh, t);
  const auto g = p2_gradients(l, barycentric_gradients(mesh, t));
  Mat2 G = Mat2::Zero();
  for (int i = 0; i < 6; ++i) {
    G.row(0) += coef[2 * nodes[i]] * g[i].transpose();
    G.row(1) += coef[2 * nodes[i] + 1] * g[i].transpose();
  }
  return G;
}

double p1_value(const PressureSpace& space, const Eigen::VectorXd& coef, int t, const std::array<double, 3>& l) {
  const auto& d = space.dofs(t);
  return l[0] * coef[d[0]] + l[1] * coef[d[1]] + l[2] * coef[d[2]];
}

VectorField p2_field(MeshPtr mesh, std::shared_ptr<const Eigen::VectorXd> coef, std::string label) {
  return VectorField::from_quad([mesh, coef](const QuadPoint& q) { return p2_value(*mesh, *coef, q.triangle, q.bary); },
                                std::move(label));
}

TensorField p2_gradient_field(MeshPtr mesh, std::shared_ptr<const Eigen::VectorXd> coef, std::string label) {
  return TensorField::from_quad(
      [mesh, coef](const QuadPoint& q) { return p2_gradient(*mesh, *coef, q.triangle, q.bary); }, std::move(label));
}

ScalarField p2_divergence_field(MeshPtr mesh, std::shared_ptr<const Eigen::VectorXd> coef, std::string label) {
  return ScalarField::from_quad(
      [mesh, coef](const QuadPoint& q) { return p2_gradient(*mesh, *coef, q.triangle, q.bary).trace(); },
      std::move(label));
}

ScalarField p1_field(std::shared_ptr<const PressureSpace> space, std::shared_ptr<const Eigen::VectorXd> coef,
                     std::string label) {
  return ScalarField::from_quad([space, coef](const QuadPoint& q) { return p1_value(*space, *coef, q.triangle, q.bary); },
                                std::move(label));
}

}  // namespace holelab
