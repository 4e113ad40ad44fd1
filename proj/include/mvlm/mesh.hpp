#pragma once

#include "mvlm/types.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

namespace mvlm {

using Triangle = std::array<std::uint32_t, 3>;

struct BoundingBox {
  Vec3 min = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 max = Vec3::Constant(-std::numeric_limits<double>::infinity());

  bool empty() const { return (min.array() > max.array()).any(); }
  void extend(const Vec3& p) {
    min = min.cwiseMin(p);
    max = max.cwiseMax(p);
  }
  void extend(const BoundingBox& b) {
    min = min.cwiseMin(b.min);
    max = max.cwiseMax(b.max);
  }
  Vec3 center() const { return 0.5 * (min + max); }
  Vec3 extent() const { return max - min; }
  bool overlaps(const BoundingBox& b) const {
    return (min.array() <= b.max.array()).all() && (b.min.array() <= max.array()).all();
  }
  bool contains(const Vec3& p) const {
    return (min.array() <= p.array()).all() && (p.array() <= max.array()).all();
  }
  // Squared distance from p to the box (0 inside).
  double squared_distance(const Vec3& p) const {
    const Vec3 d = (min - p).cwiseMax(Vec3::Zero()).cwiseMax(p - max);
    return d.squaredNorm();
  }
};

/// Triangle surface in millimetres. Optional per-vertex attributes are either
/// empty or exactly one entry per vertex.
struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<Triangle> triangles;
  std::vector<Vec3> vertex_colors;       // RGB in [0,1]
  std::vector<double> vertex_curvature;  // 1/mm

  std::size_t vertex_count() const { return vertices.size(); }
  std::size_t triangle_count() const { return triangles.size(); }
  bool has_colors() const { return !vertex_colors.empty(); }
  bool has_curvature() const { return !vertex_curvature.empty(); }

  BoundingBox bounds() const;
  // Outward (counter-clockwise) unit normal of a triangle; zero for degenerate ones.
  Vec3 triangle_normal(std::size_t t) const;
  // Unnormalised area-weighted sum of incident triangle normals.
  Vec3 vertex_normal(std::uint32_t v) const;
};

// Throws InputError describing the first violated invariant.
void validate(const TriangleMesh& mesh);

// Compressed vertex-to-vertex adjacency along triangle edges.
class VertexAdjacency {
 public:
  explicit VertexAdjacency(const TriangleMesh& mesh);

  std::span<const std::uint32_t> neighbors(std::uint32_t v) const {
    return {indices_.data() + offsets_[v], indices_.data() + offsets_[v + 1]};
  }
  std::size_t vertex_count() const { return offsets_.size() - 1; }

 private:
  std::vector<std::size_t> offsets_;
  std::vector<std::uint32_t> indices_;
};

// Breadth-first region growing along mesh edges. A vertex joins when it is
// adjacent to an already included vertex and lies within `radius` (Euclidean)
// of the seed. Keeps stamp scratch between calls, so one instance per thread.
class RegionGrower {
 public:
  RegionGrower(const TriangleMesh& mesh, const VertexAdjacency& adjacency);

  // Sorted vertex ids, seed included.
  std::vector<std::uint32_t> grow(std::uint32_t seed, double radius);

 private:
  const TriangleMesh& mesh_;
  const VertexAdjacency& adjacency_;
  std::vector<std::uint32_t> stamp_;
  std::uint32_t epoch_ = 0;
  std::vector<std::uint32_t> queue_;
};

std::vector<std::uint32_t> grow_neighborhood(const TriangleMesh& mesh, std::uint32_t vertex_id,
                                             double radius);

// Mesh file I/O. OBJ holds geometry only; PLY (ascii or binary little endian)
// may carry uchar per-vertex colours.
TriangleMesh load_mesh(const std::filesystem::path& path);
void save_obj(const TriangleMesh& mesh, const std::filesystem::path& path);
void save_ply(const TriangleMesh& mesh, const std::filesystem::path& path, bool binary = true);

}  // namespace mvlm
