#include "holelab/mesh.hpp"

#include "holelab/errors.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace holelab {

namespace {

constexpr int untagged = INT_MIN;

std::uint64_t edge_key(int a, int b) {
  const auto lo = static_cast<std::uint64_t>(std::min(a, b));
  const auto hi = static_cast<std::uint64_t>(std::max(a, b));
  return (lo << 32) | hi;
}

struct Fnv {
  std::uint64_t h = 1469598103934665603ULL;
  void bytes(const void* p, std::size_t n) {
    const auto* c = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= c[i];
      h *= 1099511628211ULL;
    }
  }
  template <class T>
  void value(const T& v) {
    bytes(&v, sizeof(T));
  }
};

double angle_at(const Point& a, const Point& b, const Point& c) {
  const Vec2 u = b - a;
  const Vec2 v = c - a;
  return std::atan2(std::abs(u.x() * v.y() - u.y() * v.x()), u.dot(v));
}

}  // namespace

void TriMesh::finalize() {
  edges_.clear();
  triangle_edges_.assign(triangles.size(), {-1, -1, -1});
  edge_triangles_.clear();
  std::unordered_map<std::uint64_t, int> index;
  index.reserve(triangles.size() * 2);
  for (std::size_t t = 0; t < triangles.size(); ++t) {
    const auto& tri = triangles[t];
    for (int j = 0; j < 3; ++j) {
      const int a = tri[j];
      const int b = tri[(j + 1) % 3];
      const auto key = edge_key(a, b);
      auto it = index.find(key);
      if (it == index.end()) {
        const int e = static_cast<int>(edges_.size());
        index.emplace(key, e);
        edges_.push_back({a, b});
        edge_triangles_.push_back({static_cast<int>(t), -1});
        triangle_edges_[t][j] = e;
      } else {
        const int e = it->second;
        if (edge_triangles_[e][1] != -1) throw InvalidSpec("non-manifold edge in mesh");
        edge_triangles_[e][1] = static_cast<int>(t);
        triangle_edges_[t][j] = e;
      }
    }
  }
  boundary_edges_.clear();
  for (int e = 0; e < num_edges(); ++e)
    if (edge_triangles_[e][1] == -1) boundary_edges_.push_back(e);
  edge_tags_.assign(edges_.size(), untagged);
  for (const auto& te : tagged_edges) {
    auto it = index.find(edge_key(te.a, te.b));
    if (it == index.end()) throw InvalidSpec("tagged edge is not an edge of the mesh");
    edge_tags_[it->second] = te.tag;
  }
  if (regions.size() != triangles.size()) regions.resize(triangles.size(), region::fluid);
  finalized_ = true;
}

int TriMesh::find_edge(int a, int b) const {
  // linear fallback is fine here: used only by tests and file import checks
  for (int e = 0; e < num_edges(); ++e) {
    const auto& ed = edges_[e];
    if ((ed[0] == a && ed[1] == b) || (ed[0] == b && ed[1] == a)) return e;
  }
  return -1;
}

std::optional<int> TriMesh::edge_tag_of(int e) const {
  if (edge_tags_[e] == untagged) return std::nullopt;
  return edge_tags_[e];
}

double TriMesh::triangle_area(int t) const {
  const auto& tri = triangles[t];
  const Point& a = vertices[tri[0]];
  const Point& b = vertices[tri[1]];
  const Point& c = vertices[tri[2]];
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x()));
}

double TriMesh::area() const {
  double s = 0.0;
  for (int t = 0; t < num_triangles(); ++t) s += triangle_area(t);
  return s;
}

double TriMesh::min_angle_degrees() const {
  double m = 180.0;
  for (const auto& tri : triangles) {
    const Point& a = vertices[tri[0]];
    const Point& b = vertices[tri[1]];
    const Point& c = vertices[tri[2]];
    m = std::min({m, angle_at(a, b, c), angle_at(b, c, a), angle_at(c, a, b)});
  }
  return m * 180.0 / pi;
}

double TriMesh::max_edge_length() const {
  double m = 0.0;
  for (const auto& e : edges_) m = std::max(m, (vertices[e[0]] - vertices[e[1]]).norm());
  return m;
}

Point TriMesh::node(int i) const {
  if (i < num_vertices()) return vertices[i];
  const auto& e = edges_[i - num_vertices()];
  return 0.5 * (vertices[e[0]] + vertices[e[1]]);
}

std::optional<std::pair<int, std::array<double, 3>>> TriMesh::locate(const Point& x, double tol) const {
  int best = -1;
  double best_min = -1e300;
  std::array<double, 3> best_bary{};
  for (int t = 0; t < num_triangles(); ++t) {
    const auto& tri = triangles[t];
    const Point& a = vertices[tri[0]];
    const Point& b = vertices[tri[1]];
    const Point& c = vertices[tri[2]];
    const double det = (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
    const double l1 = ((x.x() - a.x()) * (c.y() - a.y()) - (x.y() - a.y()) * (c.x() - a.x())) / det;
    const double l2 = ((b.x() - a.x()) * (x.y() - a.y()) - (b.y() - a.y()) * (x.x() - a.x())) / det;
    const double l0 = 1.0 - l1 - l2;
    const double mn = std::min({l0, l1, l2});
    if (mn > best_min) {
      best_min = mn;
      best = t;
      best_bary = {l0, l1, l2};
    }
  }
  if (best < 0 || best_min < -tol) return std::nullopt;
  return std::make_pair(best, best_bary);
}

std::uint64_t TriMesh::checksum() const {
  Fnv f;
  f.value(vertices.size());
  for (const auto& v : vertices) {
    f.value(v.x());
    f.value(v.y());
  }
  f.value(triangles.size());
  for (std::size_t t = 0; t < triangles.size(); ++t) {
    for (int j : triangles[t]) f.value(j);
    f.value(regions[t]);
  }
  f.value(tagged_edges.size());
  for (const auto& e : tagged_edges) {
    f.value(e.a);
    f.value(e.b);
    f.value(e.tag);
  }
  return f.h;
}

std::vector<std::vector<int>> TriMesh::tagged_loops(int tag) const {
  std::map<int, std::vector<int>> adj;
  for (const auto& e : tagged_edges) {
    if (e.tag != tag) continue;
    adj[e.a].push_back(e.b);
    adj[e.b].push_back(e.a);
  }
  std::vector<std::vector<int>> loops;
  std::map<int, bool> seen;
  for (const auto& [start, nbrs] : adj) {
    if (seen[start]) continue;
    if (nbrs.size() != 2) throw InvalidSpec("tagged edges do not form closed loops (tag " + std::to_string(tag) + ")");
    std::vector<int> loop{start};
    seen[start] = true;
    int prev = start;
    int cur = nbrs[0];
    while (cur != start) {
      const auto& cn = adj[cur];
      if (cn.size() != 2) throw InvalidSpec("tagged edges do not form closed loops (tag " + std::to_string(tag) + ")");
      seen[cur] = true;
      loop.push_back(cur);
      const int next = cn[0] == prev ? cn[1] : cn[0];
      prev = cur;
      cur = next;
    }
    loops.push_back(std::move(loop));
  }
  return loops;
}

void TriMesh::check_invariants() const {
  const int nv = num_vertices();
  for (int t = 0; t < num_triangles(); ++t) {
    for (int j : triangles[t])
      if (j < 0 || j >= nv) throw InvalidSpec("triangle vertex index out of range");
    if (!(triangle_area(t) > 0.0)) throw InvalidSpec("triangle " + std::to_string(t) + " is not positively oriented");
  }
  std::map<int, int> tags;
  for (const auto& e : tagged_edges) tags[e.tag]++;
  for (const auto& [tag, count] : tags) {
    (void)count;
    tagged_loops(tag);
  }
}

int SubMesh::node_to_parent(int local_node, const TriMesh& parent) const {
  const int nv = mesh.num_vertices();
  if (local_node < nv) return vertex_to_parent[local_node];
  return parent.num_vertices() + edge_to_parent[local_node - nv];
}

SubMesh extract_submesh_if(const TriMesh& parent, const std::vector<char>& keep) {
  SubMesh sub;
  std::vector<int> vmap(parent.num_vertices(), -1);
  for (int t = 0; t < parent.num_triangles(); ++t) {
    if (!keep[t]) continue;
    std::array<int, 3> tri{};
    for (int j = 0; j < 3; ++j) {
      const int v = parent.triangles[t][j];
      if (vmap[v] < 0) {
        vmap[v] = static_cast<int>(sub.vertex_to_parent.size());
        sub.vertex_to_parent.push_back(v);
        sub.mesh.vertices.push_back(parent.vertices[v]);
      }
      tri[j] = vmap[v];
    }
    sub.mesh.triangles.push_back(tri);
    sub.mesh.regions.push_back(parent.regions[t]);
    sub.triangle_to_parent.push_back(t);
  }
  // tagged edges: parent tags that survive, plus new boundary edges
  for (int e = 0; e < parent.num_edges(); ++e) {
    const auto& adj = parent.edge_triangles(e);
    const bool k0 = keep[adj[0]] != 0;
    const bool k1 = adj[1] >= 0 && keep[adj[1]] != 0;
    if (!k0 && !k1) continue;
    const auto& ed = parent.edges()[e];
    const auto ptag = parent.edge_tag_of(e);
    int tag;
    bool tagged = false;
    if (k0 != k1 && adj[1] >= 0) {
      const int outside = k0 ? adj[1] : adj[0];
      const int rtag = parent.regions[outside];
      if (region::is_hole_interior(rtag))
        tag = edge_tag::hole(region::cell_of(rtag));
      else
        tag = ptag.value_or(edge_tag::outer);
      tagged = true;
    } else if (ptag) {
      tag = *ptag;
      tagged = true;
    } else {
      tag = 0;
    }
    if (tagged) sub.mesh.tagged_edges.push_back({vmap[ed[0]], vmap[ed[1]], tag});
  }
  sub.mesh.finalize();
  // local edges to parent edges
  std::unordered_map<std::uint64_t, int> pindex;
  pindex.reserve(parent.num_edges() * 2);
  for (int e = 0; e < parent.num_edges(); ++e) pindex.emplace(edge_key(parent.edges()[e][0], parent.edges()[e][1]), e);
  sub.edge_to_parent.resize(sub.mesh.num_edges());
  for (int e = 0; e < sub.mesh.num_edges(); ++e) {
    const auto& ed = sub.mesh.edges()[e];
    sub.edge_to_parent[e] = pindex.at(edge_key(sub.vertex_to_parent[ed[0]], sub.vertex_to_parent[ed[1]]));
  }
  return sub;
}

SubMesh extract_fluid(const TriMesh& parent) {
  return extract_submesh(parent, [&](int t) { return !region::is_hole_interior(parent.regions[t]); });
}

SubMesh extract_annulus(const TriMesh& parent, int k) {
  const int tag = region::ball_annulus(k);
  return extract_submesh(parent, [&](int t) { return parent.regions[t] == tag; });
}

SubMesh extract_hole(const TriMesh& parent, int k) {
  const int tag = region::hole_interior(k);
  return extract_submesh(parent, [&](int t) { return parent.regions[t] == tag; });
}

TriMesh rescale_mesh(const TriMesh& mesh, double factor) {
  TriMesh out = mesh;
  for (auto& v : out.vertices) v = Point(v.x() * factor, v.y() * factor);
  out.finalize();
  return out;
}

TriMesh transform_mesh(const TriMesh& mesh, const Point& center, double factor) {
  TriMesh out = mesh;
  for (auto& v : out.vertices) v = Point((v.x() - center.x()) * factor, (v.y() - center.y()) * factor);
  out.finalize();
  return out;
}

void write_mesh(std::ostream& os, const TriMesh& mesh) {
  os << "trimesh v1 " << mesh.num_vertices() << ' ' << mesh.num_triangles() << ' ' << mesh.tagged_edges.size() << '\n';
  os << std::setprecision(17);
  for (const auto& v : mesh.vertices) os << v.x() << ' ' << v.y() << '\n';
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    os << tri[0] << ' ' << tri[1] << ' ' << tri[2] << ' ' << mesh.regions[t] << '\n';
  }
  for (const auto& e : mesh.tagged_edges) os << e.a << ' ' << e.b << ' ' << e.tag << '\n';
}

TriMesh read_mesh(std::istream& is) {
  std::string magic, version;
  long nv = 0, nt = 0, nb = 0;
  if (!(is >> magic >> version >> nv >> nt >> nb) || magic != "trimesh" || version != "v1")
    throw ConfigError("mesh file: expected header 'trimesh v1 <nv> <nt> <nb>'");
  if (nv < 0 || nt < 0 || nb < 0) throw ConfigError("mesh file: negative counts in header");
  TriMesh m;
  m.vertices.resize(nv);
  for (long i = 0; i < nv; ++i) {
    double x, y;
    if (!(is >> x >> y)) throw ConfigError("mesh file: truncated vertex section");
    m.vertices[i] = Point(x, y);
  }
  m.triangles.resize(nt);
  m.regions.resize(nt);
  for (long i = 0; i < nt; ++i) {
    auto& tri = m.triangles[i];
    if (!(is >> tri[0] >> tri[1] >> tri[2] >> m.regions[i])) throw ConfigError("mesh file: truncated triangle section");
    for (int j : tri)
      if (j < 0 || j >= nv) throw ConfigError("mesh file: vertex index out of range");
  }
  m.tagged_edges.resize(nb);
  for (long i = 0; i < nb; ++i) {
    auto& e = m.tagged_edges[i];
    if (!(is >> e.a >> e.b >> e.tag)) throw ConfigError("mesh file: truncated edge section");
  }
  m.finalize();
  return m;
}

void write_mesh_file(const std::string& path, const TriMesh& mesh) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open for writing: " + path);
  write_mesh(os, mesh);
}

TriMesh read_mesh_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open mesh file: " + path);
  return read_mesh(is);
}

}  // namespace holelab
