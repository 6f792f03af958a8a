#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <unordered_set>

#include "mesh_refiner.hpp"
#include "nsch/fem.hpp"
#include "nsch/mesh.hpp"

namespace nsch {

// ---------------------------------------------------------------------------
// Bisection

MeshRefiner::MeshRefiner(const Mesh& start)
    : verts_(start.vertices()), tris_(start.triangles()), lin_(start.lineage()) {
  base_ = start.is_base() ? std::make_shared<const Mesh>(start) : start.base_;
}

double MeshRefiner::longest_edge(int i) const {
  const auto& t = tris_[i];
  double l = 0.0;
  for (int k = 0; k < 3; ++k) {
    const Point& a = verts_[t[k]];
    const Point& b = verts_[t[(k + 1) % 3]];
    l = std::max(l, std::hypot(a.x - b.x, a.y - b.y));
  }
  return l;
}

int MeshRefiner::midpoint(int a, int b) {
  auto [it, inserted] = mid_.try_emplace(key(a, b), static_cast<int>(verts_.size()));
  if (inserted) {
    verts_.push_back({0.5 * (verts_[a].x + verts_[b].x), 0.5 * (verts_[a].y + verts_[b].y)});
  }
  return it->second;
}

void MeshRefiner::refine(const std::vector<char>& marked) {
  if (marked.size() != tris_.size()) throw std::invalid_argument("MeshRefiner: mark size");
  // Closure: every triangle with a split edge must also split its refinement edge.
  std::unordered_set<std::uint64_t> split;
  for (std::size_t i = 0; i < tris_.size(); ++i) {
    if (marked[i]) split.insert(key(tris_[i][0], tris_[i][1]));
  }
  if (split.empty()) return;
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& t : tris_) {
      std::uint64_t ref = key(t[0], t[1]);
      if (split.count(ref)) continue;
      if (split.count(key(t[1], t[2])) || split.count(key(t[2], t[0]))) {
        split.insert(ref);
        changed = true;
      }
    }
  }
  for (bool changed = true; changed;) {
    changed = false;
    std::vector<Triangle> tris;
    std::vector<Lineage> lin;
    tris.reserve(tris_.size() * 2);
    lin.reserve(tris_.size() * 2);
    for (std::size_t i = 0; i < tris_.size(); ++i) {
      const auto& t = tris_[i];
      if (!split.count(key(t[0], t[1]))) {
        tris.push_back(t);
        lin.push_back(lin_[i]);
        continue;
      }
      if (lin_[i].depth >= 63) throw std::length_error("MeshRefiner: bisection depth overflow");
      int m = midpoint(t[0], t[1]);
      tris.push_back({t[2], t[0], m});
      lin.push_back(lin_[i].child(0));
      tris.push_back({t[1], t[2], m});
      lin.push_back(lin_[i].child(1));
      changed = true;
    }
    tris_ = std::move(tris);
    lin_ = std::move(lin);
  }
}

Mesh MeshRefiner::build() const { return Mesh(verts_, tris_, lin_, base_); }

// ---------------------------------------------------------------------------
// Indicator and adaptation

void AdaptOptions::validate() const {
  auto req = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("AdaptOptions: ") + what);
  };
  req(threshold > 0, "threshold must be positive");
  req(coarsen_threshold >= 0 && coarsen_threshold <= threshold,
      "coarsen_threshold must lie in [0, threshold]");
  req(interval >= 1, "interval must be >= 1");
  req(h_min > 0, "h_min must be positive");
  req(max_depth >= 0 && max_depth <= 60, "max_depth must lie in [0, 60]");
}

std::vector<double> gradient_indicator(const P2Space& space, std::span<const double> c,
                                       std::span<const std::array<double, 3>> samples) {
  static const std::array<Bary, 3> corners{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
  std::vector<P2Basis> basis;
  for (const auto& b : corners) basis.push_back(p2_basis(b));
  for (const auto& b : samples) basis.push_back(p2_basis(b));
  std::vector<double> ind(space.num_elements(), 0.0);
  for (int t = 0; t < space.num_elements(); ++t) {
    ElementMap map(space.mesh(), t);
    auto d = space.element_dofs(t);
    double best = 0.0;
    for (const auto& b : basis) {
      std::array<double, 2> ref{0.0, 0.0};
      for (int i = 0; i < 6; ++i) {
        ref[0] += b.grad[i][0] * c[d[i]];
        ref[1] += b.grad[i][1] * c[d[i]];
      }
      auto g = map.physical_grad(ref);
      best = std::max(best, std::hypot(g[0], g[1]));
    }
    ind[t] = best;
  }
  return ind;
}

namespace {

struct Flags {
  std::vector<double> indicator;
  double refine_at = std::numeric_limits<double>::infinity();
  double keep_at = std::numeric_limits<double>::infinity();
};

Flags compute_flags(const P2Space& space, std::span<const double> c, const AdaptOptions& opts) {
  opts.validate();
  if (static_cast<int>(c.size()) != space.num_dofs()) {
    throw std::invalid_argument("adapt: field size does not match the space");
  }
  QuadratureRule rule = quadrature(6);
  Flags f;
  f.indicator = gradient_indicator(space, c, rule.points);
  double scale = 1.0;
  if (opts.relative) {
    scale = f.indicator.empty() ? 0.0 : *std::max_element(f.indicator.begin(), f.indicator.end());
  }
  // a flat field has a roundoff-level max gradient; relative flags would chase the noise
  if (scale > 1e-8) {
    f.refine_at = opts.threshold * scale;
    f.keep_at = opts.coarsen_threshold * scale;
  }
  return f;
}

}  // namespace

Mesh adapt(const P2Space& space, std::span<const double> c, const AdaptOptions& opts) {
  Flags f = compute_flags(space, c, opts);
  const Mesh& old = space.mesh();
  std::unordered_set<Lineage, LineageHash> flagged, kept;
  for (int t = 0; t < old.num_triangles(); ++t) {
    const Lineage& l = old.lineage()[t];
    if (f.indicator[t] > f.refine_at) flagged.insert(l);
    if (f.indicator[t] > f.keep_at || f.indicator[t] > f.refine_at) {
      for (int d = 0; d < l.depth; ++d) kept.insert(l.ancestor(d));
    }
  }
  const double h_lim = opts.h_min * (1.0 + 1e-10);
  MeshRefiner r(old.base());
  while (true) {
    std::vector<char> marks(r.num_leaves(), 0);
    std::vector<int> too_deep;
    bool any = false;
    for (int i = 0; i < r.num_leaves(); ++i) {
      const Lineage& l = r.lineage(i);
      bool refine = kept.count(l) > 0;
      if (!refine && !flagged.empty() && r.longest_edge(i) > h_lim) {
        for (int d = l.depth; d >= 0; --d) {
          if (flagged.count(l.ancestor(d))) {
            refine = true;
            if (l.depth >= opts.max_depth) too_deep.push_back(i);
            break;
          }
        }
      }
      marks[i] = refine;
      any = any || refine;
    }
    if (!too_deep.empty()) {
      std::ostringstream os;
      os << "adapt: " << too_deep.size() << " triangle(s) at max_depth " << opts.max_depth
         << " still above h_min " << opts.h_min << " (first: " << too_deep.front() << ")";
      throw AdaptDepthError(std::move(too_deep), os.str());
    }
    if (!any) break;
    r.refine(marks);
  }
  return r.build();
}

std::vector<int> pending_refinement(const P2Space& space, std::span<const double> c,
                                    const AdaptOptions& opts) {
  Flags f = compute_flags(space, c, opts);
  std::vector<int> out;
  for (int t = 0; t < space.num_elements(); ++t) {
    if (f.indicator[t] > f.refine_at && space.mesh().longest_edge(t) > opts.h_min * (1.0 + 1e-10)) {
      out.push_back(t);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Point location and transfer

PointLocator::PointLocator(const Mesh& mesh) : mesh_(&mesh) {
  const auto& v = mesh.vertices();
  double x1 = -std::numeric_limits<double>::infinity(), y1 = x1;
  x0_ = y0_ = std::numeric_limits<double>::infinity();
  for (const auto& p : v) {
    x0_ = std::min(x0_, p.x);
    y0_ = std::min(y0_, p.y);
    x1 = std::max(x1, p.x);
    y1 = std::max(y1, p.y);
  }
  int n = std::max(1, static_cast<int>(std::sqrt(double(mesh.num_triangles()) / 2.0)));
  nx_ = ny_ = n;
  dx_ = (x1 - x0_) / nx_;
  dy_ = (y1 - y0_) / ny_;
  if (dx_ <= 0) dx_ = 1.0;
  if (dy_ <= 0) dy_ = 1.0;
  auto cell_range = [&](const Triangle& t, int& i0, int& i1, int& j0, int& j1) {
    double a = v[t[0]].x, b = v[t[0]].x, c = v[t[0]].y, d = v[t[0]].y;
    for (int k = 1; k < 3; ++k) {
      a = std::min(a, v[t[k]].x);
      b = std::max(b, v[t[k]].x);
      c = std::min(c, v[t[k]].y);
      d = std::max(d, v[t[k]].y);
    }
    const double pad = 1e-9;
    i0 = std::clamp(static_cast<int>(std::floor((a - pad - x0_) / dx_)), 0, nx_ - 1);
    i1 = std::clamp(static_cast<int>(std::floor((b + pad - x0_) / dx_)), 0, nx_ - 1);
    j0 = std::clamp(static_cast<int>(std::floor((c - pad - y0_) / dy_)), 0, ny_ - 1);
    j1 = std::clamp(static_cast<int>(std::floor((d + pad - y0_) / dy_)), 0, ny_ - 1);
  };
  std::vector<int> count(std::size_t(nx_) * ny_ + 1, 0);
  for (const auto& t : mesh.triangles()) {
    int i0, i1, j0, j1;
    cell_range(t, i0, i1, j0, j1);
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i) ++count[j * nx_ + i + 1];
  }
  for (std::size_t k = 1; k < count.size(); ++k) count[k] += count[k - 1];
  start_ = count;
  items_.resize(count.back());
  for (int ti = 0; ti < mesh.num_triangles(); ++ti) {
    int i0, i1, j0, j1;
    cell_range(mesh.triangles()[ti], i0, i1, j0, j1);
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i) items_[count[j * nx_ + i]++] = ti;
  }
}

int PointLocator::locate(Point p, std::array<double, 3>& bary, double tol) const {
  const auto& v = mesh_->vertices();
  int i = std::clamp(static_cast<int>(std::floor((p.x - x0_) / dx_)), 0, nx_ - 1);
  int j = std::clamp(static_cast<int>(std::floor((p.y - y0_) / dy_)), 0, ny_ - 1);
  int cell = j * nx_ + i;
  int found = -1;
  double best = -std::numeric_limits<double>::infinity();
  for (int k = start_[cell]; k < start_[cell + 1]; ++k) {
    const auto& t = mesh_->triangles()[items_[k]];
    const Point &a = v[t[0]], &b = v[t[1]], &c = v[t[2]];
    double det = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    double l1 = ((p.x - a.x) * (c.y - a.y) - (p.y - a.y) * (c.x - a.x)) / det;
    double l2 = ((b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x)) / det;
    double l0 = 1.0 - l1 - l2;
    double worst = std::min({l0, l1, l2});
    if (worst >= -tol && worst > best) {
      best = worst;
      found = items_[k];
      bary = {l0, l1, l2};
    }
  }
  if (found >= 0) {
    double s = 0.0;
    for (double& l : bary) {
      if (l < 1e-12) l = 0.0;
      s += l;
    }
    for (double& l : bary) l /= s;
  }
  return found;
}

Transfer::Transfer(const P2Space& from, const P2Space& to) : from_(&from) {
  PointLocator loc(from.mesh());
  const auto& x = to.dof_coords();
  element_.resize(x.size());
  bary_.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    element_[i] = loc.locate(x[i], bary_[i]);
    if (element_[i] < 0) {
      std::ostringstream os;
      os << "transfer: point (" << x[i].x << ", " << x[i].y << ") not in source mesh";
      throw PointLocationError(x[i], os.str());
    }
  }
}

std::vector<double> Transfer::apply(std::span<const double> field) const {
  std::vector<double> out(element_.size());
  for (std::size_t i = 0; i < element_.size(); ++i) {
    out[i] = eval_p2(*from_, field, element_[i], bary_[i]);
  }
  return out;
}

std::vector<double> transfer(const P2Space& from, const P2Space& to,
                             std::span<const double> field) {
  return Transfer(from, to).apply(field);
}

}  // namespace nsch
