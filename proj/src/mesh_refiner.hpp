#pragma once

#include <cstdint>
#include <memory>
#include <unordered_map>
#include <vector>

#include "nsch/mesh.hpp"

namespace nsch {

/// Newest-vertex bisection with conforming closure. Starts from the leaves
/// of an existing mesh and produces a new Mesh sharing its base.
class MeshRefiner {
 public:
  explicit MeshRefiner(const Mesh& start);

  int num_leaves() const { return static_cast<int>(tris_.size()); }
  const Triangle& leaf(int i) const { return tris_[i]; }
  const Lineage& lineage(int i) const { return lin_[i]; }
  double longest_edge(int i) const;

  /// Bisect the marked leaves plus whatever closure requires.
  void refine(const std::vector<char>& marked);

  Mesh build() const;

 private:
  static std::uint64_t key(int a, int b) {
    if (a > b) std::swap(a, b);
    return (std::uint64_t(a) << 32) | std::uint32_t(b);
  }
  int midpoint(int a, int b);

  std::shared_ptr<const Mesh> base_;
  std::vector<Point> verts_;
  std::vector<Triangle> tris_;
  std::vector<Lineage> lin_;
  std::unordered_map<std::uint64_t, int> mid_;
};

}  // namespace nsch
