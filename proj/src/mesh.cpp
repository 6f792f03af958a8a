#include "nsch/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>

#include "mesh_refiner.hpp"
#include "nsch/fem.hpp"

namespace nsch {

namespace {

double dist(const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y); }

double cross(const Point& a, const Point& b, const Point& c) {
  return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (std::uint64_t(a) << 32) | std::uint32_t(b);
}

}  // namespace

std::size_t LineageHash::operator()(const Lineage& l) const noexcept {
  std::uint64_t h = l.path * 0x9E3779B97F4A7C15ull;
  h ^= (std::uint64_t(std::uint32_t(l.root)) << 8) ^ std::uint64_t(std::uint32_t(l.depth));
  h *= 0xBF58476D1CE4E5B9ull;
  return static_cast<std::size_t>(h ^ (h >> 31));
}

Mesh::Mesh(std::vector<Point> vertices, std::vector<Triangle> triangles)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)) {
  const int nv = num_vertices();
  for (auto& t : triangles_) {
    for (int v : t) {
      if (v < 0 || v >= nv) throw std::invalid_argument("Mesh: vertex index out of range");
    }
    double a = cross(vertices_[t[0]], vertices_[t[1]], vertices_[t[2]]);
    if (a == 0.0) throw std::invalid_argument("Mesh: degenerate triangle");
    if (a < 0) std::swap(t[1], t[2]);
    // longest edge first; ties resolved by the lowest opposite vertex
    int best = 0;
    double len = -1.0;
    for (int i = 0; i < 3; ++i) {
      double l = dist(vertices_[t[(i + 1) % 3]], vertices_[t[(i + 2) % 3]]);
      if (l > len * (1.0 + 1e-12)) {
        len = l;
        best = i;
      }
    }
    t = {t[(best + 1) % 3], t[(best + 2) % 3], t[best]};
  }
  lineage_.resize(triangles_.size());
  for (std::size_t i = 0; i < triangles_.size(); ++i) lineage_[i] = {static_cast<int>(i), 0, 0};
  build_edges();
}

Mesh::Mesh(std::vector<Point> vertices, std::vector<Triangle> triangles,
           std::vector<Lineage> lineage, std::shared_ptr<const Mesh> base)
    : vertices_(std::move(vertices)),
      triangles_(std::move(triangles)),
      lineage_(std::move(lineage)),
      base_(std::move(base)) {
  build_edges();
}

void Mesh::build_edges() {
  std::unordered_map<std::uint64_t, int> index;
  index.reserve(triangles_.size() * 2);
  std::vector<int> count;
  edges_.clear();
  triangle_edges_.assign(triangles_.size(), {});
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    const auto& tri = triangles_[t];
    for (int i = 0; i < 3; ++i) {
      int a = tri[(i + 1) % 3], b = tri[(i + 2) % 3];
      auto [it, inserted] = index.try_emplace(edge_key(a, b), static_cast<int>(edges_.size()));
      if (inserted) {
        edges_.push_back({std::min(a, b), std::max(a, b)});
        count.push_back(0);
      }
      ++count[it->second];
      triangle_edges_[t][i] = it->second;
    }
  }
  edge_markers_.resize(edges_.size());
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    edge_markers_[e] = count[e] == 1 ? Marker::wall : Marker::interior;
  }
}

double Mesh::signed_area(int t) const {
  const auto& tri = triangles_[t];
  return 0.5 * cross(vertices_[tri[0]], vertices_[tri[1]], vertices_[tri[2]]);
}

double Mesh::longest_edge(int t) const {
  const auto& tri = triangles_[t];
  double l = 0.0;
  for (int i = 0; i < 3; ++i) l = std::max(l, dist(vertices_[tri[i]], vertices_[tri[(i + 1) % 3]]));
  return l;
}

double Mesh::total_area() const {
  double a = 0.0;
  for (int t = 0; t < num_triangles(); ++t) a += signed_area(t);
  return a;
}

Point Mesh::centroid(int t) const {
  const auto& tri = triangles_[t];
  Point c;
  for (int v : tri) {
    c.x += vertices_[v].x / 3.0;
    c.y += vertices_[v].y / 3.0;
  }
  return c;
}

void Mesh::validate() const {
  auto fail = [](const std::string& s) { throw std::logic_error("Mesh::validate: " + s); };
  std::vector<char> used(vertices_.size(), 0);
  for (int t = 0; t < num_triangles(); ++t) {
    if (!(signed_area(t) > 0)) fail("non-positive area in triangle " + std::to_string(t));
    for (int v : triangles_[t]) used[v] = 1;
  }
  if (std::find(used.begin(), used.end(), 0) != used.end()) fail("unused vertex");
  std::vector<int> count(edges_.size(), 0);
  for (const auto& te : triangle_edges_) {
    for (int e : te) ++count[e];
  }
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    if (count[e] > 2) fail("edge shared by more than two triangles");
  }
  // Any hanging node shows up as a vertex lying inside an edge, which breaks
  // the Euler characteristic of a disc.
  long euler = long(num_vertices()) - long(num_edges()) + long(num_triangles());
  if (euler != 1) fail("Euler characteristic " + std::to_string(euler) + " != 1");
  if (lineage_.size() != triangles_.size()) fail("lineage size mismatch");
}

bool Mesh::same_triangulation(const Mesh& other) const {
  if (triangles_ != other.triangles_ || vertices_.size() != other.vertices_.size()) return false;
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    if (vertices_[i].x != other.vertices_[i].x || vertices_[i].y != other.vertices_[i].y) {
      return false;
    }
  }
  return true;
}

Mesh build_rect_mesh(int nx, int ny, const Rect& domain) {
  if (nx < 1 || ny < 1) throw std::invalid_argument("build_rect_mesh: need nx, ny >= 1");
  std::vector<Point> v;
  v.reserve(std::size_t(nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      v.push_back({domain.x0 + (domain.x1 - domain.x0) * i / nx,
                   domain.y0 + (domain.y1 - domain.y0) * j / ny});
    }
  }
  auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
  std::vector<Triangle> t;
  t.reserve(std::size_t(2) * nx * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      t.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      t.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  return Mesh(std::move(v), std::move(t));
}

Mesh bisect_uniform(const Mesh& m, int rounds) {
  MeshRefiner r(m);
  for (int k = 0; k < rounds; ++k) r.refine(std::vector<char>(r.num_leaves(), 1));
  return r.build();
}

// ---------------------------------------------------------------------------

P2Space::P2Space(std::shared_ptr<const Mesh> mesh) : mesh_(std::move(mesh)) {
  const Mesh& m = *mesh_;
  const int nv = m.num_vertices();
  coords_ = m.vertices();
  coords_.reserve(nv + m.num_edges());
  for (const auto& e : m.edges()) {
    const Point& a = m.vertices()[e[0]];
    const Point& b = m.vertices()[e[1]];
    coords_.push_back({0.5 * (a.x + b.x), 0.5 * (a.y + b.y)});
  }
  dofs_.resize(6 * std::size_t(m.num_triangles()));
  for (int t = 0; t < m.num_triangles(); ++t) {
    for (int i = 0; i < 3; ++i) {
      dofs_[6 * t + i] = m.triangles()[t][i];
      dofs_[6 * t + 3 + i] = nv + m.triangle_edges()[t][i];
    }
  }
  for (int e = 0; e < m.num_edges(); ++e) {
    if (m.edge_markers()[e] != Marker::wall) continue;
    wall_dofs_.push_back(m.edges()[e][0]);
    wall_dofs_.push_back(m.edges()[e][1]);
    wall_dofs_.push_back(nv + e);
  }
  std::sort(wall_dofs_.begin(), wall_dofs_.end());
  wall_dofs_.erase(std::unique(wall_dofs_.begin(), wall_dofs_.end()), wall_dofs_.end());
}

const std::vector<int>& P2Space::boundary_dofs(Marker marker) const {
  return marker == Marker::wall ? wall_dofs_ : no_dofs_;
}

std::shared_ptr<const P2Space> build_p2_space(std::shared_ptr<const Mesh> mesh) {
  return std::make_shared<const P2Space>(std::move(mesh));
}

double eval_p2(const P2Space& space, std::span<const double> field, int t,
               const std::array<double, 3>& bary) {
  P2Basis b = p2_basis(bary);
  auto d = space.element_dofs(t);
  double v = 0.0;
  for (int i = 0; i < 6; ++i) v += b.value[i] * field[d[i]];
  return v;
}

std::array<double, 2> grad_p2(const P2Space& space, std::span<const double> field, int t,
                              const std::array<double, 3>& bary) {
  P2Basis b = p2_basis(bary);
  ElementMap map(space.mesh(), t);
  auto d = space.element_dofs(t);
  std::array<double, 2> ref{0.0, 0.0};
  for (int i = 0; i < 6; ++i) {
    ref[0] += b.grad[i][0] * field[d[i]];
    ref[1] += b.grad[i][1] * field[d[i]];
  }
  return map.physical_grad(ref);
}

}  // namespace nsch
