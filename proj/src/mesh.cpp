#include "mvlm/mesh.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace mvlm {

BoundingBox TriangleMesh::bounds() const {
  BoundingBox box;
  for (const auto& v : vertices) box.extend(v);
  return box;
}

Vec3 TriangleMesh::triangle_normal(std::size_t t) const {
  const auto& tri = triangles[t];
  const Vec3 n = (vertices[tri[1]] - vertices[tri[0]]).cross(vertices[tri[2]] - vertices[tri[0]]);
  const double len = n.norm();
  return len > 0.0 ? Vec3(n / len) : Vec3::Zero();
}

Vec3 TriangleMesh::vertex_normal(std::uint32_t v) const {
  // Linear scan; only used for per-vertex orientation, callers with many
  // vertices should go through the curvature kernels which cache incidence.
  Vec3 sum = Vec3::Zero();
  for (const auto& tri : triangles) {
    if (tri[0] == v || tri[1] == v || tri[2] == v) {
      sum += (vertices[tri[1]] - vertices[tri[0]]).cross(vertices[tri[2]] - vertices[tri[0]]);
    }
  }
  return sum;
}

void validate(const TriangleMesh& mesh) {
  const std::size_t n = mesh.vertex_count();
  if (mesh.triangles.empty()) throw InputError("mesh has no triangles");
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    const auto& tri = mesh.triangles[t];
    for (auto idx : tri) {
      if (idx >= n) {
        throw InputError("triangle " + std::to_string(t) + " references vertex " +
                         std::to_string(idx) + " but mesh has " + std::to_string(n) + " vertices");
      }
    }
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) {
      throw InputError("triangle " + std::to_string(t) + " repeats a vertex index");
    }
  }
  for (const auto& v : mesh.vertices) {
    if (!v.allFinite()) throw InputError("mesh has a non-finite vertex coordinate");
  }
  if (mesh.has_colors() && mesh.vertex_colors.size() != n) {
    throw InputError("vertex colour count does not match vertex count");
  }
  if (mesh.has_curvature() && mesh.vertex_curvature.size() != n) {
    throw InputError("vertex curvature count does not match vertex count");
  }
}

VertexAdjacency::VertexAdjacency(const TriangleMesh& mesh) {
  const std::size_t n = mesh.vertex_count();
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  edges.reserve(mesh.triangle_count() * 6);
  for (const auto& tri : mesh.triangles) {
    for (int k = 0; k < 3; ++k) {
      const auto a = tri[k];
      const auto b = tri[(k + 1) % 3];
      edges.emplace_back(a, b);
      edges.emplace_back(b, a);
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  offsets_.assign(n + 1, 0);
  for (const auto& e : edges) ++offsets_[e.first + 1];
  for (std::size_t i = 0; i < n; ++i) offsets_[i + 1] += offsets_[i];
  indices_.resize(edges.size());
  for (std::size_t i = 0; i < edges.size(); ++i) indices_[i] = edges[i].second;
}

RegionGrower::RegionGrower(const TriangleMesh& mesh, const VertexAdjacency& adjacency)
    : mesh_(mesh), adjacency_(adjacency), stamp_(mesh.vertex_count(), 0) {}

std::vector<std::uint32_t> RegionGrower::grow(std::uint32_t seed, double radius) {
  if (seed >= mesh_.vertex_count()) throw std::out_of_range("region growing seed out of range");
  if (++epoch_ == 0) {
    std::fill(stamp_.begin(), stamp_.end(), 0);
    epoch_ = 1;
  }
  const Vec3& origin = mesh_.vertices[seed];
  const double r2 = radius * radius;

  queue_.clear();
  queue_.push_back(seed);
  stamp_[seed] = epoch_;
  for (std::size_t head = 0; head < queue_.size(); ++head) {
    for (auto nb : adjacency_.neighbors(queue_[head])) {
      if (stamp_[nb] == epoch_) continue;
      if ((mesh_.vertices[nb] - origin).squaredNorm() > r2) continue;
      stamp_[nb] = epoch_;
      queue_.push_back(nb);
    }
  }
  std::vector<std::uint32_t> result(queue_.begin(), queue_.end());
  std::sort(result.begin(), result.end());
  return result;
}

std::vector<std::uint32_t> grow_neighborhood(const TriangleMesh& mesh, std::uint32_t vertex_id,
                                             double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("region growing radius must be positive");
  const VertexAdjacency adjacency(mesh);
  RegionGrower grower(mesh, adjacency);
  return grower.grow(vertex_id, radius);
}

}  // namespace mvlm
