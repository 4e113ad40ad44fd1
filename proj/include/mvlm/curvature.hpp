#pragma once

#include "mvlm/mesh.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace mvlm {

inline constexpr double kDefaultCurvatureRadius = 10.0;  // mm
// Fitted spheres larger than this are treated as flat.
inline constexpr double kFlatSphereRadius = 1e6;  // mm

struct CurvatureEstimate {
  double value = 0.0;       // signed mean curvature, 1/mm, convex positive
  bool degenerate = false;  // too few or collinear neighbours; value is 0
};

/// Per-vertex signed mean curvature.
struct CurvatureField {
  std::vector<double> values;
  std::vector<std::uint8_t> degenerate;
  double radius = kDefaultCurvatureRadius;

  std::size_t degenerate_count() const;
};

// Sphere fit over `neighborhood` (which must contain the vertex itself).
// `outward` orients the local plane normal and may be zero.
CurvatureEstimate fit_vertex_curvature(const TriangleMesh& mesh, std::uint32_t vertex_id,
                                       std::span<const std::uint32_t> neighborhood, const Vec3& outward);

CurvatureEstimate estimate_vertex_curvature(const TriangleMesh& mesh, std::uint32_t vertex_id,
                                            double radius = kDefaultCurvatureRadius);

// OpenMP over vertices. Each value depends only on its own vertex, so the
// result is bit-identical to the serial reference.
CurvatureField estimate_curvature_field(const TriangleMesh& mesh, double radius = kDefaultCurvatureRadius);
namespace serial {
CurvatureField estimate_curvature_field(const TriangleMesh& mesh, double radius = kDefaultCurvatureRadius);
}

// Area-weighted incident triangle normals, unnormalised.
std::vector<Vec3> area_weighted_vertex_normals(const TriangleMesh& mesh);

// Sidecar: "CRV1", uint32 vertex count, float64 radius, then float32 per vertex.
void write_curvature_sidecar(const CurvatureField& field, const std::filesystem::path& path);
CurvatureField read_curvature_sidecar(const std::filesystem::path& path);

}  // namespace mvlm
