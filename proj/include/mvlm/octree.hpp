#pragma once

#include "mvlm/mesh.hpp"

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace mvlm {

struct ClosestPoint {
  Vec3 point = Vec3::Zero();
  std::uint32_t triangle_id = 0;
  double distance = 0.0;
  Vec3 barycentric = Vec3::Zero();  // weights of the triangle's three corners
};

// Closest point on the closed triangle abc to p (region decomposition).
// Degenerate triangles fall back to the closest point on their edges.
ClosestPoint closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

// Reference scan over every triangle.
ClosestPoint closest_point_brute_force(const TriangleMesh& mesh, const Vec3& p);

struct OctreeOptions {
  int max_depth = 10;
  std::size_t max_triangles_per_leaf = 32;
};

/// Axis-aligned octree over triangle bounding boxes. A triangle is stored in
/// every leaf its bounding box overlaps. Immutable after construction and safe
/// to query from several threads.
class Octree {
 public:
  struct Node {
    BoundingBox box;
    std::int32_t first_child = -1;  // index of 8 consecutive children, -1 for a leaf
    std::uint32_t first_triangle = 0;
    std::uint32_t triangle_count = 0;
    bool is_leaf() const { return first_child < 0; }
  };

  struct QueryStats {
    std::size_t nodes_visited = 0;
    std::size_t triangles_tested = 0;  // distinct triangles
  };

  Octree(const TriangleMesh& mesh, OctreeOptions options = {});

  ClosestPoint closest_point(const Vec3& p, QueryStats* stats = nullptr) const;

  const std::vector<Node>& nodes() const { return nodes_; }
  std::span<const std::uint32_t> leaf_triangles(const Node& leaf) const {
    return {triangle_refs_.data() + leaf.first_triangle, leaf.triangle_count};
  }
  const OctreeOptions& options() const { return options_; }
  const TriangleMesh& mesh() const { return *mesh_; }

 private:
  void build(std::size_t node, std::vector<std::uint32_t> tris, int depth,
             const std::vector<BoundingBox>& tri_boxes);

  const TriangleMesh* mesh_;
  OctreeOptions options_;
  std::vector<Node> nodes_;
  std::vector<std::uint32_t> triangle_refs_;
};

Octree build_octree(const TriangleMesh& mesh, int max_depth = 10, std::size_t max_tris = 32);
ClosestPoint closest_surface_point(const Octree& octree, const TriangleMesh& mesh, const Vec3& p);

// Batch query kernels: OpenMP over query points, and the serial reference.
std::vector<ClosestPoint> closest_surface_points(const Octree& octree, std::span<const Vec3> points);
namespace serial {
std::vector<ClosestPoint> closest_surface_points(const Octree& octree, std::span<const Vec3> points);
}

}  // namespace mvlm
