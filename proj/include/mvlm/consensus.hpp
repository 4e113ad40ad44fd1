#pragma once

#include "mvlm/camera.hpp"
#include "mvlm/detector.hpp"
#include "mvlm/octree.hpp"
#include "mvlm/serialization.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace mvlm {

/// A landmark observation lifted to 3D: every point on the ray images to the
/// detection's pixel.
struct LandmarkRay {
  Vec3 origin = Vec3::Zero();
  Vec3 direction = Vec3::UnitZ();  // unit
  int landmark_id = 0;
  int view_id = 0;
  double confidence = 1.0;
};

// `camera_view_id` identifies the camera; a detection from another view is rejected.
LandmarkRay back_project(const CameraSpec& camera, int camera_view_id, const Detection2D& detection);

// (p - a).(p - a) - ((p - a).n)^2, evaluated as the squared rejection of p - a from n.
double point_to_ray_sqdist(const Vec3& p, const LandmarkRay& ray);
// Sum of the above over a bundle.
double sum_sq_ray_distance(const Vec3& p, std::span<const LandmarkRay> rays);

// Moore-Penrose inverse of a symmetric 3x3 matrix via its eigen
// decomposition; eigenvalues below rel_tol * max|eigenvalue| count as zero.
Mat3 pseudo_inverse_symmetric(const Mat3& m, double rel_tol = 1e-9, int* rank = nullptr);

// Which sign the normal equations are assembled with. `AsWritten` uses
// S = sum(n n^T - I), C = sum(n n^T - I) a; `Negated` flips both.
enum class NormalEquationSign { AsWritten, Negated };

struct RayFit {
  Vec3 point = Vec3::Zero();
  bool ok = false;  // false when the bundle does not pin down a unique point
  int rank = 0;
};

// Least-squares point closest to all rays, p = S^+ C. For rank-deficient
// bundles (all rays parallel) returns the minimum-norm minimiser with ok=false.
RayFit lsq_point_from_rays(std::span<const LandmarkRay> rays, NormalEquationSign sign = NormalEquationSign::AsWritten);

struct RansacConfig {
  int iterations = 500;
  double inlier_threshold = 2.0;  // mm, point-to-ray distance
  int min_inliers = 3;
  std::uint64_t rng_seed = 0;
};

void validate(const RansacConfig& config);

struct RansacResult {
  Vec3 point = Vec3::Zero();
  std::vector<std::size_t> inliers;  // indices into the input bundle, ascending
  double rms_residual = 0.0;         // over inliers at `point`, mm
  bool ok = false;
};

// Three-ray hypotheses scored by inlier count (ties: lower inlier RMS), then
// a least-squares refit on the winning inlier set. Sampling runs over the
// bundle sorted by (view_id, landmark_id), so input order does not matter.
RansacResult ransac_consensus(std::span<const LandmarkRay> rays, const RansacConfig& config);

enum class LandmarkStatus { Resolved, Absent };

struct ConsensusResult {
  int landmark_id = 0;
  LandmarkStatus status = LandmarkStatus::Absent;
  Vec3 point = Vec3::Zero();          // ray consensus
  Vec3 surface_point = Vec3::Zero();  // consensus snapped to the mesh
  std::vector<int> inlier_view_ids;
  double rms_residual = 0.0;
  int ray_count_used = 0;

  bool resolved() const { return status == LandmarkStatus::Resolved; }
};

// Per landmark: back-project every detection through cameras[view_id], run
// RANSAC and snap the consensus to the closest surface point. Landmarks listed
// in `expected_ids` but never detected, or failing RANSAC, come back Absent.
// Results are sorted by landmark id. RANSAC for each landmark is seeded from
// config.rng_seed and the landmark id, so the OpenMP kernel matches the serial
// reference exactly.
std::vector<ConsensusResult> place_landmarks(const Octree& octree, std::span<const CameraSpec> cameras,
                                             std::span<const Detection2D> detections, const RansacConfig& config,
                                             std::span<const int> expected_ids = {});
namespace serial {
std::vector<ConsensusResult> place_landmarks(const Octree& octree, std::span<const CameraSpec> cameras,
                                             std::span<const Detection2D> detections, const RansacConfig& config,
                                             std::span<const int> expected_ids = {});
}

std::string to_string(LandmarkStatus s);
Json to_json(const ConsensusResult& r);
ConsensusResult consensus_result_from_json(const Json& j);
Json results_to_json(std::span<const ConsensusResult> results);
std::vector<ConsensusResult> results_from_json(const Json& doc);

}  // namespace mvlm
