#pragma once

#include "holelab/geometry.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace holelab {

/// Region labels, stored as plain integers in the mesh file:
///   0        fluid
///   2k + 1   interior of hole k
///   2k + 2   ball annulus B(x_k, b1*eps) \ T_k
namespace region {
inline constexpr int fluid = 0;
inline constexpr int hole_interior(int k) { return 2 * k + 1; }
inline constexpr int ball_annulus(int k) { return 2 * k + 2; }
inline constexpr bool is_hole_interior(int tag) { return tag > 0 && tag % 2 == 1; }
inline constexpr bool is_ball_annulus(int tag) { return tag > 0 && tag % 2 == 0; }
inline constexpr int cell_of(int tag) { return (tag - 1) / 2; }
}  // namespace region

/// Edge labels:
///   0        outer boundary
///   k + 1    boundary of hole k
///   -(k + 1) circle of ball k (interior edges of a perforated mesh)
namespace edge_tag {
inline constexpr int outer = 0;
inline constexpr int hole(int k) { return k + 1; }
inline constexpr int ball(int k) { return -(k + 1); }
}  // namespace edge_tag

struct TaggedEdge {
  int a = 0;
  int b = 0;
  int tag = 0;
};

/// Conforming straight-sided triangulation.
///
/// Edges are numbered in order of first appearance in the triangle list.
/// Local edge 0 = (v0,v1), 1 = (v1,v2), 2 = (v2,v0). Edge midpoints carry
/// the quadratic nodes.
class TriMesh {
public:
  std::vector<Point> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<int> regions;
  std::vector<TaggedEdge> tagged_edges;

  /// Build edges, triangle-edge incidence, and edge-triangle adjacency.
  /// Must be called after the arrays above are final.
  void finalize();

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_triangles() const { return static_cast<int>(triangles.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }

  const std::vector<std::array<int, 2>>& edges() const { return edges_; }
  const std::array<int, 3>& triangle_edges(int t) const { return triangle_edges_[t]; }
  /// Triangles adjacent to an edge; second entry is -1 on the boundary.
  const std::array<int, 2>& edge_triangles(int e) const { return edge_triangles_[e]; }
  /// Edge index of vertex pair (a,b), or -1.
  int find_edge(int a, int b) const;
  /// Edges with exactly one adjacent triangle.
  const std::vector<int>& boundary_edges() const { return boundary_edges_; }
  /// Tag of a boundary edge (from tagged_edges), or nullopt if untagged.
  std::optional<int> edge_tag_of(int e) const;

  double triangle_area(int t) const;  ///< signed
  double area() const;                ///< sum of signed areas
  double min_angle_degrees() const;
  double max_edge_length() const;

  /// Coordinate of quadratic node i (vertices first, then edge midpoints).
  Point node(int i) const;
  int num_quadratic_nodes() const { return num_vertices() + num_edges(); }

  /// Locate a triangle containing x; returns (triangle, barycentric).
  std::optional<std::pair<int, std::array<double, 3>>> locate(const Point& x, double tol = 1e-12) const;

  /// FNV-1a over coordinates (bitwise), connectivity, and tags.
  std::uint64_t checksum() const;

  /// Throws InvalidSpec when a structural invariant fails: orientation,
  /// tag loops closed, indices in range.
  void check_invariants() const;

  /// Closed loops formed by the edges carrying `tag`, as vertex cycles.
  std::vector<std::vector<int>> tagged_loops(int tag) const;

  bool finalized() const { return finalized_; }

private:
  std::vector<std::array<int, 2>> edges_;
  std::vector<std::array<int, 3>> triangle_edges_;
  std::vector<std::array<int, 2>> edge_triangles_;
  std::vector<int> boundary_edges_;
  std::vector<int> edge_tags_;  // per edge; INT_MIN when untagged
  bool finalized_ = false;
};

/// A mesh made from a subset of another mesh's triangles, with maps back to
/// the parent. Edges between kept and dropped triangles become tagged
/// boundary edges: facing hole k -> hole(k); otherwise the parent tag of
/// that edge, or `outer` if it had none.
struct SubMesh {
  TriMesh mesh;
  std::vector<int> vertex_to_parent;
  std::vector<int> triangle_to_parent;
  std::vector<int> edge_to_parent;

  /// Parent quadratic-node index of a local quadratic node.
  int node_to_parent(int local_node, const TriMesh& parent) const;
};

template <class Keep>
SubMesh extract_submesh(const TriMesh& parent, Keep keep);

SubMesh extract_submesh_if(const TriMesh& parent, const std::vector<char>& keep_triangle);

/// Fluid part of a perforated mesh: drop hole interiors.
SubMesh extract_fluid(const TriMesh& parent);
/// Triangles tagged ball_annulus(k).
SubMesh extract_annulus(const TriMesh& parent, int k);
/// Triangles tagged hole_interior(k).
SubMesh extract_hole(const TriMesh& parent, int k);

/// x -> factor * x. Connectivity and tags unchanged.
TriMesh rescale_mesh(const TriMesh& mesh, double factor);
/// x -> factor * (x - center).
TriMesh transform_mesh(const TriMesh& mesh, const Point& center, double factor);

/// `trimesh v1 <nv> <nt> <nb>` text format.
void write_mesh(std::ostream& os, const TriMesh& mesh);
TriMesh read_mesh(std::istream& is);
void write_mesh_file(const std::string& path, const TriMesh& mesh);
TriMesh read_mesh_file(const std::string& path);

template <class Keep>
SubMesh extract_submesh(const TriMesh& parent, Keep keep) {
  std::vector<char> k(parent.num_triangles());
  for (int t = 0; t < parent.num_triangles(); ++t) k[t] = keep(t) ? 1 : 0;
  return extract_submesh_if(parent, k);
}

}  // namespace holelab
