#include "mvlm/curvature.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

namespace mvlm {
namespace {

constexpr double kPlanarEigenRatio = 1e-14;
constexpr double kCollinearEigenRatio = 1e-12;

CurvatureEstimate degenerate_estimate() { return {0.0, true}; }

}  // namespace

std::size_t CurvatureField::degenerate_count() const {
  return static_cast<std::size_t>(std::count(degenerate.begin(), degenerate.end(), std::uint8_t{1}));
}

std::vector<Vec3> area_weighted_vertex_normals(const TriangleMesh& mesh) {
  std::vector<Vec3> normals(mesh.vertex_count(), Vec3::Zero());
  for (const auto& tri : mesh.triangles) {
    const Vec3 n = (mesh.vertices[tri[1]] - mesh.vertices[tri[0]]).cross(mesh.vertices[tri[2]] - mesh.vertices[tri[0]]);
    for (auto v : tri) normals[v] += n;
  }
  return normals;
}

CurvatureEstimate fit_vertex_curvature(const TriangleMesh& mesh, std::uint32_t vertex_id,
                                       std::span<const std::uint32_t> neighborhood, const Vec3& outward) {
  const Vec3& p = mesh.vertices[vertex_id];
  std::vector<Vec3> local;
  local.reserve(neighborhood.size());
  for (auto id : neighborhood) {
    if (id == vertex_id) continue;
    const Vec3 q = mesh.vertices[id] - p;
    if (q.squaredNorm() > 0.0) local.push_back(q);
  }
  if (local.size() < 4) return degenerate_estimate();
  const auto n = static_cast<Eigen::Index>(local.size());

  // Plane through the neighbourhood, used for degeneracy checks and to orient
  // the sphere normal consistently with the surface.
  Eigen::MatrixX3d q(n, 3);
  for (Eigen::Index i = 0; i < n; ++i) q.row(i) = local[i].transpose();
  const double scale = q.rowwise().norm().maxCoeff();
  q /= scale;
  const Eigen::RowVector3d centroid = ((q.colwise().sum()) / static_cast<double>(n + 1));  // P is the origin
  Mat3 cov = centroid.transpose() * centroid;  // P's own contribution
  const Eigen::MatrixX3d centered = q.rowwise() - centroid;
  cov += centered.transpose() * centered;
  const Eigen::SelfAdjointEigenSolver<Mat3> pca(cov);
  const Vec3 lambda = pca.eigenvalues();  // ascending
  if (lambda[1] <= kCollinearEigenRatio * lambda[2]) return degenerate_estimate();
  if (lambda[0] <= kPlanarEigenRatio * lambda[2]) return {0.0, false};
  Vec3 normal = pca.eigenvectors().col(0);
  if (normal.dot(outward) < 0.0) normal = -normal;

  // Inversion about P maps spheres through P onto planes: a sphere with centre
  // c (relative to P) becomes the plane c.y = 1/2. Fit that plane by PCA.
  Eigen::MatrixX3d inv(n, 3);
  for (Eigen::Index i = 0; i < n; ++i) inv.row(i) = q.row(i) / q.row(i).squaredNorm();
  const Eigen::RowVector3d inv_mean = inv.colwise().mean();
  const Eigen::MatrixX3d inv_centered = inv.rowwise() - inv_mean;
  const Eigen::SelfAdjointEigenSolver<Mat3> plane(inv_centered.transpose() * inv_centered);
  Vec3 m = plane.eigenvectors().col(0);
  if (m.dot(normal) < 0.0) m = -m;
  const double offset = m.dot(inv_mean.transpose());  // plane m.y = offset
  if (!std::isfinite(offset)) return degenerate_estimate();

  // Sphere centre m / (2 offset), radius 1 / (2 |offset|), in scaled units.
  const double curvature = -2.0 * offset / scale;
  if (std::abs(curvature) < 1.0 / kFlatSphereRadius) return {0.0, false};
  return {curvature, false};
}

CurvatureEstimate estimate_vertex_curvature(const TriangleMesh& mesh, std::uint32_t vertex_id, double radius) {
  const auto hood = grow_neighborhood(mesh, vertex_id, radius);
  return fit_vertex_curvature(mesh, vertex_id, hood, mesh.vertex_normal(vertex_id));
}

CurvatureField estimate_curvature_field(const TriangleMesh& mesh, double radius) {
  CurvatureField field;
  field.radius = radius;
  field.values.assign(mesh.vertex_count(), 0.0);
  field.degenerate.assign(mesh.vertex_count(), 0);
  const VertexAdjacency adjacency(mesh);
  const auto normals = area_weighted_vertex_normals(mesh);
  const auto count = static_cast<std::ptrdiff_t>(mesh.vertex_count());

#pragma omp parallel
  {
    RegionGrower grower(mesh, adjacency);
#pragma omp for schedule(dynamic, 256)
    for (std::ptrdiff_t v = 0; v < count; ++v) {
      const auto id = static_cast<std::uint32_t>(v);
      const auto est = fit_vertex_curvature(mesh, id, grower.grow(id, radius), normals[id]);
      field.values[v] = est.value;
      field.degenerate[v] = est.degenerate ? 1 : 0;
    }
  }
  return field;
}

namespace serial {
CurvatureField estimate_curvature_field(const TriangleMesh& mesh, double radius) {
  CurvatureField field;
  field.radius = radius;
  const VertexAdjacency adjacency(mesh);
  const auto normals = area_weighted_vertex_normals(mesh);
  RegionGrower grower(mesh, adjacency);
  for (std::uint32_t v = 0; v < mesh.vertex_count(); ++v) {
    const auto est = fit_vertex_curvature(mesh, v, grower.grow(v, radius), normals[v]);
    field.values.push_back(est.value);
    field.degenerate.push_back(est.degenerate ? 1 : 0);
  }
  return field;
}
}  // namespace serial

void write_curvature_sidecar(const CurvatureField& field, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write curvature sidecar '" + path.string() + "'");
  const auto count = static_cast<std::uint32_t>(field.values.size());
  out.write("CRV1", 4);
  out.write(reinterpret_cast<const char*>(&count), sizeof(count));
  out.write(reinterpret_cast<const char*>(&field.radius), sizeof(field.radius));
  for (double v : field.values) {
    const auto f = static_cast<float>(v);
    out.write(reinterpret_cast<const char*>(&f), sizeof(f));
  }
}

CurvatureField read_curvature_sidecar(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open curvature sidecar '" + path.string() + "'");
  char magic[4];
  std::uint32_t count = 0;
  CurvatureField field;
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(&count), sizeof(count));
  in.read(reinterpret_cast<char*>(&field.radius), sizeof(field.radius));
  if (!in || std::memcmp(magic, "CRV1", 4) != 0) throw InputError("'" + path.string() + "' is not a CRV1 sidecar");
  field.values.resize(count);
  field.degenerate.assign(count, 0);
  for (auto& v : field.values) {
    float f = 0;
    if (!in.read(reinterpret_cast<char*>(&f), sizeof(f))) throw InputError("truncated curvature sidecar");
    v = f;
  }
  return field;
}

}  // namespace mvlm
