#pragma once

#include "holelab/errors.hpp"
#include "holelab/geometry.hpp"
#include "holelab/mesh.hpp"
#include "holelab/quadrature.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace holelab {

using MeshPtr = std::shared_ptr<const TriMesh>;

inline MeshPtr share(TriMesh mesh) { return std::make_shared<const TriMesh>(std::move(mesh)); }

/// A quadrature point of a mesh triangle.
struct QuadPoint {
  int triangle = 0;
  int index = 0;   ///< index within the rule
  int degree = 0;  ///< degree of the rule
  Point x = Point::Zero();
  std::array<double, 3> bary{};
};

/// Physical point of barycentric coordinates in triangle t.
inline Point map_to_triangle(const TriMesh& mesh, int t, const std::array<double, 3>& l) {
  const auto& tri = mesh.triangles[t];
  return l[0] * mesh.vertices[tri[0]] + l[1] * mesh.vertices[tri[1]] + l[2] * mesh.vertices[tri[2]];
}

/// Data evaluable at quadrature points: either a closed-form function of
/// position (also evaluable anywhere) or a table bound to one mesh and one
/// quadrature rule.
template <class T>
class Field {
public:
  using PointEval = std::function<T(const Point&)>;
  using QuadEval = std::function<T(const QuadPoint&)>;

  Field() = default;

  static Field closed_form(PointEval f, std::string label = "closed-form") {
    Field out;
    out.label_ = std::move(label);
    out.point_ = std::move(f);
    auto pf = out.point_;
    out.quad_ = [pf](const QuadPoint& q) { return pf(q.x); };
    return out;
  }

  static Field zero() {
    Field out = closed_form([](const Point&) { return zero_value(); }, "zero");
    out.zero_ = true;
    return out;
  }

  /// values[t * rule_size + i] belongs to quadrature point i of triangle t.
  static Field table(const TriMesh& mesh, int degree, std::vector<T> values, std::string label = "table") {
    const int nq = triangle_rule(degree).size();
    if (static_cast<long>(values.size()) != static_cast<long>(mesh.num_triangles()) * nq)
      throw PreconditionError("quadrature table has the wrong number of entries");
    Field out;
    out.label_ = std::move(label);
    out.table_degree_ = degree;
    out.table_checksum_ = mesh.checksum();
    auto data = std::make_shared<const std::vector<T>>(std::move(values));
    const int nt = mesh.num_triangles();
    out.quad_ = [data, degree, nq, nt](const QuadPoint& q) {
      if (q.degree != degree || q.triangle < 0 || q.triangle >= nt)
        throw PreconditionError("table field evaluated off its quadrature points");
      return (*data)[static_cast<std::size_t>(q.triangle) * nq + q.index];
    };
    return out;
  }

  /// Field given by an arbitrary evaluator at quadrature points of any rule
  /// (finite-element fields).
  static Field from_quad(QuadEval f, std::string label) {
    Field out;
    out.label_ = std::move(label);
    out.quad_ = std::move(f);
    return out;
  }

  T operator()(const QuadPoint& q) const {
    if (!quad_) throw PreconditionError("field is empty");
    return quad_(q);
  }

  /// Pointwise evaluation; only closed-form fields support it.
  T at(const Point& x) const {
    if (!point_) throw PreconditionError("field '" + label_ + "' is not evaluable at arbitrary points");
    return point_(x);
  }

  bool valid() const { return static_cast<bool>(quad_); }
  bool is_zero() const { return zero_; }
  bool pointwise() const { return static_cast<bool>(point_); }
  std::optional<int> table_degree() const { return table_degree_; }
  /// Throws unless a table field belongs to `mesh`.
  void check_mesh(const TriMesh& mesh) const {
    if (table_checksum_ && *table_checksum_ != mesh.checksum())
      throw PreconditionError("table field '" + label_ + "' belongs to a different mesh");
  }
  const std::string& label() const { return label_; }

private:
  static T zero_value() {
    if constexpr (std::is_arithmetic_v<T>)
      return T(0);
    else
      return T::Zero();
  }

  std::string label_;
  PointEval point_;
  QuadEval quad_;
  std::optional<int> table_degree_;
  std::optional<std::uint64_t> table_checksum_;
  bool zero_ = false;
};

using ScalarField = Field<double>;
using VectorField = Field<Vec2>;
using TensorField = Field<Mat2>;

/// Calls f(q, weight) for every quadrature point of the mesh; weight
/// includes the triangle area.
template <class F>
void for_each_quad_point(const TriMesh& mesh, int degree, F&& f) {
  const QuadRule& rule = triangle_rule(degree);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const double area = mesh.triangle_area(t);
    for (int i = 0; i < rule.size(); ++i) {
      QuadPoint q{t, i, degree, map_to_triangle(mesh, t, rule.bary[i]), rule.bary[i]};
      f(q, area * rule.weights[i]);
    }
  }
}

}  // namespace holelab
