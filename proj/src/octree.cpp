#include "mvlm/octree.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <unordered_set>

namespace mvlm {
namespace {

ClosestPoint closest_on_segment(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double len2 = ab.squaredNorm();
  const double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  ClosestPoint r;
  r.point = a + t * ab;
  r.distance = (p - r.point).norm();
  r.barycentric = Vec3(1.0 - t, t, 0.0);
  return r;
}

}  // namespace

ClosestPoint closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  ClosestPoint r;
  auto finish = [&](double u, double v, double w) {
    r.barycentric = Vec3(u, v, w);
    r.point = u * a + v * b + w * c;
    r.distance = (p - r.point).norm();
    return r;
  };

  const Vec3 ab = b - a;
  const Vec3 ac = c - a;
  const double longest2 = std::max({ab.squaredNorm(), ac.squaredNorm(), (c - b).squaredNorm()});
  if (ab.cross(ac).squaredNorm() <= 1e-30 * longest2 * longest2) {
    // Zero-area triangle: best of the three edges.
    ClosestPoint best = closest_on_segment(p, a, b);
    ClosestPoint e = closest_on_segment(p, b, c);
    if (e.distance < best.distance) best = ClosestPoint{e.point, 0, e.distance, Vec3(0.0, e.barycentric[0], e.barycentric[1])};
    e = closest_on_segment(p, c, a);
    if (e.distance < best.distance) best = ClosestPoint{e.point, 0, e.distance, Vec3(e.barycentric[1], 0.0, e.barycentric[0])};
    return best;
  }

  const Vec3 ap = p - a;
  const double d1 = ab.dot(ap);
  const double d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return finish(1, 0, 0);

  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp);
  const double d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return finish(0, 1, 0);

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
    const double v = d1 / (d1 - d3);
    return finish(1 - v, v, 0);
  }

  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp);
  const double d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return finish(0, 0, 1);

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
    const double w = d2 / (d2 - d6);
    return finish(1 - w, 0, w);
  }

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    return finish(0, 1 - w, w);
  }

  const double denom = 1.0 / (va + vb + vc);
  const double v = vb * denom;
  const double w = vc * denom;
  return finish(1 - v - w, v, w);
}

ClosestPoint closest_point_brute_force(const TriangleMesh& mesh, const Vec3& p) {
  if (mesh.triangles.empty()) throw std::invalid_argument("closest point query on an empty mesh");
  ClosestPoint best;
  best.distance = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    const auto& tri = mesh.triangles[t];
    ClosestPoint c = closest_point_on_triangle(p, mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]]);
    if (c.distance < best.distance) {
      best = c;
      best.triangle_id = static_cast<std::uint32_t>(t);
    }
  }
  return best;
}

Octree::Octree(const TriangleMesh& mesh, OctreeOptions options) : mesh_(&mesh), options_(options) {
  if (mesh.triangles.empty()) throw std::invalid_argument("octree over an empty mesh");
  if (options_.max_depth < 0) options_.max_depth = 0;
  if (options_.max_triangles_per_leaf == 0) options_.max_triangles_per_leaf = 1;

  std::vector<BoundingBox> tri_boxes(mesh.triangle_count());
  BoundingBox root;
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    for (auto v : mesh.triangles[t]) tri_boxes[t].extend(mesh.vertices[v]);
    root.extend(tri_boxes[t]);
  }
  // Flat or thin meshes still get a box with volume so children are well defined.
  const double pad = 1e-9 * std::max(1.0, root.extent().maxCoeff());
  for (int k = 0; k < 3; ++k) {
    if (root.extent()[k] < pad) {
      root.min[k] -= pad;
      root.max[k] += pad;
    }
  }

  std::vector<std::uint32_t> all(mesh.triangle_count());
  for (std::size_t t = 0; t < all.size(); ++t) all[t] = static_cast<std::uint32_t>(t);
  nodes_.push_back(Node{root});
  build(0, std::move(all), 0, tri_boxes);
}

void Octree::build(std::size_t node, std::vector<std::uint32_t> tris, int depth,
                   const std::vector<BoundingBox>& tri_boxes) {
  auto make_leaf = [&] {
    nodes_[node].first_triangle = static_cast<std::uint32_t>(triangle_refs_.size());
    nodes_[node].triangle_count = static_cast<std::uint32_t>(tris.size());
    triangle_refs_.insert(triangle_refs_.end(), tris.begin(), tris.end());
  };
  if (tris.size() <= options_.max_triangles_per_leaf || depth >= options_.max_depth) {
    make_leaf();
    return;
  }

  const BoundingBox box = nodes_[node].box;
  const Vec3 mid = box.center();
  std::array<BoundingBox, 8> child_boxes;
  std::array<std::vector<std::uint32_t>, 8> child_tris;
  bool splits = false;
  for (int c = 0; c < 8; ++c) {
    for (int k = 0; k < 3; ++k) {
      const bool upper = (c >> k) & 1;
      child_boxes[c].min[k] = upper ? mid[k] : box.min[k];
      child_boxes[c].max[k] = upper ? box.max[k] : mid[k];
    }
    for (auto t : tris) {
      if (tri_boxes[t].overlaps(child_boxes[c])) child_tris[c].push_back(t);
    }
    splits |= child_tris[c].size() < tris.size();
  }
  // No child separates anything: further splitting only duplicates references.
  if (!splits) {
    make_leaf();
    return;
  }

  const auto first = static_cast<std::int32_t>(nodes_.size());
  nodes_[node].first_child = first;
  for (int c = 0; c < 8; ++c) nodes_.push_back(Node{child_boxes[c]});
  for (int c = 0; c < 8; ++c) build(static_cast<std::size_t>(first + c), std::move(child_tris[c]), depth + 1, tri_boxes);
}

ClosestPoint Octree::closest_point(const Vec3& p, QueryStats* stats) const {
  const auto& mesh = *mesh_;
  ClosestPoint best;
  best.distance = std::numeric_limits<double>::infinity();
  double best_d2 = std::numeric_limits<double>::infinity();
  std::unordered_set<std::uint32_t> tested;

  // Depth-first, nearest child first, pruned by box distance.
  std::vector<std::uint32_t> stack{0};
  while (!stack.empty()) {
    const Node& n = nodes_[stack.back()];
    stack.pop_back();
    if (n.box.squared_distance(p) > best_d2) continue;
    if (stats) ++stats->nodes_visited;
    if (n.is_leaf()) {
      for (auto t : leaf_triangles(n)) {
        if (!tested.insert(t).second) continue;
        const auto& tri = mesh.triangles[t];
        ClosestPoint c = closest_point_on_triangle(p, mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]]);
        // Ties go to the lower triangle id, matching the brute-force scan order.
        if (c.distance < best.distance || (c.distance == best.distance && t < best.triangle_id)) {
          best = c;
          best.triangle_id = t;
          best_d2 = c.distance * c.distance;
        }
      }
      continue;
    }
    std::array<std::pair<double, std::uint32_t>, 8> order;
    for (int c = 0; c < 8; ++c) {
      const auto id = static_cast<std::uint32_t>(n.first_child + c);
      order[c] = {nodes_[id].box.squared_distance(p), id};
    }
    std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    for (const auto& [d2, id] : order) {
      if (d2 <= best_d2) stack.push_back(id);
    }
  }
  if (stats) stats->triangles_tested += tested.size();
  return best;
}

Octree build_octree(const TriangleMesh& mesh, int max_depth, std::size_t max_tris) {
  return Octree(mesh, OctreeOptions{max_depth, max_tris});
}

ClosestPoint closest_surface_point(const Octree& octree, const TriangleMesh& mesh, const Vec3& p) {
  if (&octree.mesh() != &mesh) throw std::invalid_argument("octree was built over a different mesh");
  return octree.closest_point(p);
}

std::vector<ClosestPoint> closest_surface_points(const Octree& octree, std::span<const Vec3> points) {
  std::vector<ClosestPoint> out(points.size());
  const auto n = static_cast<std::ptrdiff_t>(points.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = octree.closest_point(points[i]);
  return out;
}

namespace serial {
std::vector<ClosestPoint> closest_surface_points(const Octree& octree, std::span<const Vec3> points) {
  std::vector<ClosestPoint> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(octree.closest_point(p));
  return out;
}
}  // namespace serial

}  // namespace mvlm
