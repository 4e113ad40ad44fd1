#pragma once

// Fixtures and independent reference computations shared by the test suites.
// Nothing here calls into the code paths it is used to check.

#include "mvlm/consensus.hpp"
#include "mvlm/mesh.hpp"
#include "mvlm/shapes.hpp"

#include <Eigen/Geometry>

#include <cmath>
#include <filesystem>
#include <limits>
#include <numbers>
#include <queue>
#include <random>
#include <set>
#include <string>

namespace mvlm::testing {

inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("mvlm_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vec3 v(g(rng), g(rng), g(rng));
  return v.normalized();
}

inline Vec3 random_in_ball(std::mt19937_64& rng, double radius) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vec3 v;
  do v = Vec3(u(rng), u(rng), u(rng));
  while (v.squaredNorm() > 1.0);
  return radius * v;
}

inline Mat3 random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::Quaterniond q(g(rng), g(rng), g(rng), g(rng));
  return q.normalized().toRotationMatrix();
}

inline TriangleMesh transformed(TriangleMesh mesh, const Mat3& r, const Vec3& t, double scale = 1.0) {
  for (auto& v : mesh.vertices) v = scale * (r * v) + t;
  return mesh;
}

// A ray through `through` with direction `dir`, origin pulled back along it.
inline LandmarkRay ray_through(const Vec3& through, const Vec3& dir, int view_id, double back = 300.0) {
  LandmarkRay r;
  r.direction = dir.normalized();
  r.origin = through - back * r.direction;
  r.view_id = view_id;
  return r;
}

// Squared distance to a ray as the squared norm of the rejection vector.
inline double rejection_sqdist(const Vec3& p, const LandmarkRay& ray) {
  const Vec3 d = p - ray.origin;
  const Vec3 rej = d - d.dot(ray.direction) * ray.direction;
  return rej.squaredNorm();
}

inline double ray_objective(const Vec3& p, std::span<const LandmarkRay> rays) {
  double s = 0.0;
  for (const auto& r : rays) s += rejection_sqdist(p, r);
  return s;
}

// Central-difference gradient and Hessian of the objective.
inline Vec3 fd_gradient(const Vec3& p, std::span<const LandmarkRay> rays, double h) {
  Vec3 g;
  for (int k = 0; k < 3; ++k) {
    Vec3 e = Vec3::Zero();
    e[k] = h;
    g[k] = (ray_objective(p + e, rays) - ray_objective(p - e, rays)) / (2.0 * h);
  }
  return g;
}

inline Mat3 fd_hessian(const Vec3& p, std::span<const LandmarkRay> rays, double h) {
  Mat3 hess;
  for (int k = 0; k < 3; ++k) {
    Vec3 e = Vec3::Zero();
    e[k] = h;
    hess.col(k) = (fd_gradient(p + e, rays, h) - fd_gradient(p - e, rays, h)) / (2.0 * h);
  }
  return 0.5 * (hess + hess.transpose());
}

// Newton iterations on the objective driven only by finite differences of
// the distance sum; for this quadratic objective they converge in one or two
// steps from any start.
inline Vec3 numeric_ray_minimizer(std::span<const LandmarkRay> rays, Vec3 start, double h = 1.0) {
  Vec3 p = start;
  for (int it = 0; it < 4; ++it) {
    const Mat3 hess = fd_hessian(p, rays, h);
    const Vec3 g = fd_gradient(p, rays, h);
    p -= hess.fullPivLu().solve(g);
  }
  return p;
}

// Breadth-first search over an edge set built directly from the triangles.
inline std::set<std::uint32_t> bfs_oracle(const TriangleMesh& mesh, std::uint32_t seed, double radius) {
  std::vector<std::set<std::uint32_t>> adj(mesh.vertex_count());
  for (const auto& t : mesh.triangles) {
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        if (a != b) adj[t[a]].insert(t[b]);
      }
    }
  }
  std::set<std::uint32_t> seen{seed};
  std::queue<std::uint32_t> q;
  q.push(seed);
  while (!q.empty()) {
    const auto v = q.front();
    q.pop();
    for (auto n : adj[v]) {
      if (seen.contains(n)) continue;
      if ((mesh.vertices[n] - mesh.vertices[seed]).norm() > radius) continue;
      seen.insert(n);
      q.push(n);
    }
  }
  return seen;
}

// Random closed-ish mesh: jittered icosphere with an offset.
inline TriangleMesh random_mesh(std::mt19937_64& rng, int subdivisions = 2) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto mesh = shapes::icosphere(subdivisions, 50.0 + 30.0 * u(rng), Vec3(u(rng), u(rng), u(rng)) * 20.0);
  for (auto& v : mesh.vertices) v += Vec3(u(rng), u(rng), u(rng)) * 4.0;
  return mesh;
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace mvlm::testing
