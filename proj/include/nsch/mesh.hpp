#pragma once

// Triangulations with a bisection history, quadratic dof numbering,
// gradient-driven newest-vertex-bisection adaptation and field transfer.

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace nsch {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct Rect {
  double x0 = -1.0, y0 = -1.0, x1 = 1.0, y1 = 1.0;
  double area() const { return (x1 - x0) * (y1 - y0); }
};

enum class Marker : std::uint8_t { interior = 0, wall = 1 };

using Triangle = std::array<int, 3>;
using Edge = std::array<int, 2>;

/// Position of a triangle in the bisection forest of its base mesh.
/// path holds one bit per bisection, most recent bit lowest.
struct Lineage {
  std::int32_t root = 0;
  std::int32_t depth = 0;
  std::uint64_t path = 0;

  Lineage child(int bit) const { return {root, depth + 1, (path << 1) | std::uint64_t(bit & 1)}; }
  Lineage ancestor(int at_depth) const {
    return {root, at_depth, path >> (depth - at_depth)};
  }
  bool operator==(const Lineage&) const = default;
};

struct LineageHash {
  std::size_t operator()(const Lineage& l) const noexcept;
};

/// Conforming triangulation. Vertex order is counterclockwise and the first
/// two vertices of each triangle span its refinement edge; the third is the
/// newest vertex.
class Mesh {
 public:
  /// Base mesh. Triangles are rotated so that the longest edge becomes the
  /// refinement edge (which keeps bisection closure finite).
  Mesh(std::vector<Point> vertices, std::vector<Triangle> triangles);

  const std::vector<Point>& vertices() const { return vertices_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  const std::vector<Edge>& edges() const { return edges_; }
  /// triangle_edges()[t][i] is the edge opposite local vertex i.
  const std::vector<std::array<int, 3>>& triangle_edges() const { return triangle_edges_; }
  /// Per-edge marker: wall for the outer boundary, interior otherwise.
  const std::vector<Marker>& edge_markers() const { return edge_markers_; }
  const std::vector<Lineage>& lineage() const { return lineage_; }

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_triangles() const { return static_cast<int>(triangles_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }

  double signed_area(int t) const;
  double longest_edge(int t) const;
  double total_area() const;
  Point centroid(int t) const;

  /// Mesh this one was bisected from (itself for a base mesh).
  const Mesh& base() const { return base_ ? *base_ : *this; }
  bool is_base() const { return !base_; }

  /// Throws std::logic_error if any structural invariant fails.
  void validate() const;

  bool same_triangulation(const Mesh& other) const;

 private:
  friend class MeshRefiner;
  Mesh(std::vector<Point> vertices, std::vector<Triangle> triangles, std::vector<Lineage> lineage,
       std::shared_ptr<const Mesh> base);
  void build_edges();

  std::vector<Point> vertices_;
  std::vector<Triangle> triangles_;
  std::vector<Lineage> lineage_;
  std::vector<Edge> edges_;
  std::vector<std::array<int, 3>> triangle_edges_;
  std::vector<Marker> edge_markers_;
  std::shared_ptr<const Mesh> base_;
};

/// Structured nx-by-ny grid over a rectangle, each cell split along the
/// lower-left to upper-right diagonal.
Mesh build_rect_mesh(int nx, int ny, const Rect& domain = {});

/// Bisect every triangle `rounds` times (two rounds halve the mesh size).
Mesh bisect_uniform(const Mesh& m, int rounds);

/// Continuous piecewise-quadratic Lagrange space. Dofs are the mesh vertices
/// followed by the edge midpoints (dof V + e for edge e). Local dofs of a
/// triangle: its 3 vertices, then the midpoints of the edges opposite vertex
/// 0, 1, 2.
class P2Space {
 public:
  explicit P2Space(std::shared_ptr<const Mesh> mesh);

  const Mesh& mesh() const { return *mesh_; }
  std::shared_ptr<const Mesh> mesh_ptr() const { return mesh_; }
  int num_dofs() const { return static_cast<int>(coords_.size()); }
  int num_elements() const { return mesh_->num_triangles(); }
  std::span<const int, 6> element_dofs(int t) const {
    return std::span<const int, 6>(dofs_.data() + 6 * static_cast<std::size_t>(t), 6);
  }
  const std::vector<Point>& dof_coords() const { return coords_; }
  /// Sorted dofs on edges carrying the marker.
  const std::vector<int>& boundary_dofs(Marker marker = Marker::wall) const;

 private:
  std::shared_ptr<const Mesh> mesh_;
  std::vector<Point> coords_;
  std::vector<int> dofs_;
  std::vector<int> wall_dofs_;
  std::vector<int> no_dofs_;
};

std::shared_ptr<const P2Space> build_p2_space(std::shared_ptr<const Mesh> mesh);

/// Evaluate a P2 field at barycentric coordinates of triangle t.
double eval_p2(const P2Space& space, std::span<const double> field, int t,
               const std::array<double, 3>& bary);
/// Physical gradient of a P2 field on triangle t at barycentric coordinates.
std::array<double, 2> grad_p2(const P2Space& space, std::span<const double> field, int t,
                              const std::array<double, 3>& bary);

// ---------------------------------------------------------------------------
// Adaptation

struct AdaptOptions {
  double threshold = 0.1;           // refine where max |grad c| exceeds this
  double coarsen_threshold = 0.05;  // keep existing refinement above this
  bool relative = true;             // thresholds scale with the global max |grad c|
  int interval = 10;                // steps between adaptations
  double h_min = 1.0 / 128.0;       // target longest edge inside flagged regions
  int max_depth = 24;               // bisection levels below the base mesh

  void validate() const;
  bool operator==(const AdaptOptions&) const = default;
};

class AdaptDepthError : public std::runtime_error {
 public:
  AdaptDepthError(std::vector<int> triangles, const std::string& what)
      : std::runtime_error(what), triangles_(std::move(triangles)) {}
  /// Offending triangle indices in the candidate mesh.
  const std::vector<int>& triangles() const { return triangles_; }

 private:
  std::vector<int> triangles_;
};

/// Per-triangle max |grad c| over the three vertices and the given
/// barycentric sample points.
std::vector<double> gradient_indicator(const P2Space& space, std::span<const double> c,
                                       std::span<const std::array<double, 3>> samples);

/// Rebuild a conforming mesh from the base of `space.mesh()`: triangles
/// overlapping a flagged old triangle are bisected down to h_min, strict
/// ancestors of old triangles above the coarsening threshold are kept
/// refined, everything else falls back to the base mesh.
Mesh adapt(const P2Space& space, std::span<const double> c, const AdaptOptions& opts);

/// True when a triangle of `space` would still be refined by adapt().
std::vector<int> pending_refinement(const P2Space& space, std::span<const double> c,
                                    const AdaptOptions& opts);

// ---------------------------------------------------------------------------
// Transfer

class PointLocationError : public std::runtime_error {
 public:
  PointLocationError(Point p, const std::string& what) : std::runtime_error(what), point_(p) {}
  Point point() const { return point_; }

 private:
  Point point_;
};

/// Locates every dof of `to` in `from` once; apply() interpolates any number
/// of P2 fields.
class Transfer {
 public:
  Transfer(const P2Space& from, const P2Space& to);
  std::vector<double> apply(std::span<const double> field) const;

 private:
  const P2Space* from_;
  std::vector<int> element_;
  std::vector<std::array<double, 3>> bary_;
};

/// Locate points in a mesh with a uniform bucket grid.
class PointLocator {
 public:
  explicit PointLocator(const Mesh& mesh);
  /// Returns the containing triangle and barycentric coordinates, or -1.
  int locate(Point p, std::array<double, 3>& bary, double tol = 1e-10) const;

 private:
  const Mesh* mesh_;
  double x0_, y0_, dx_, dy_;
  int nx_, ny_;
  std::vector<int> start_;
  std::vector<int> items_;
};

std::vector<double> transfer(const P2Space& from, const P2Space& to, std::span<const double> field);

}  // namespace nsch
