#include "mvlm/consensus.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

namespace mvlm {

LandmarkRay back_project(const CameraSpec& camera, int camera_view_id, const Detection2D& detection) {
  if (detection.view_id != camera_view_id) {
    throw std::invalid_argument("detection from view " + std::to_string(detection.view_id) +
                                " back-projected through camera of view " + std::to_string(camera_view_id));
  }
  const Ray r = unproject(camera, detection.u, detection.v);
  return LandmarkRay{r.origin, r.direction, detection.landmark_id, detection.view_id, detection.confidence};
}

double point_to_ray_sqdist(const Vec3& p, const LandmarkRay& ray) {
  // Same quantity as |d|^2 - (d.n)^2, without the cancellation far along the ray.
  const Vec3 d = p - ray.origin;
  return (d - d.dot(ray.direction) * ray.direction).squaredNorm();
}

double sum_sq_ray_distance(const Vec3& p, std::span<const LandmarkRay> rays) {
  double sum = 0.0;
  for (const auto& r : rays) sum += point_to_ray_sqdist(p, r);
  return sum;
}

Mat3 pseudo_inverse_symmetric(const Mat3& m, double rel_tol, int* rank) {
  const Eigen::SelfAdjointEigenSolver<Mat3> eig(m);
  const Vec3& lambda = eig.eigenvalues();
  const double cutoff = rel_tol * lambda.cwiseAbs().maxCoeff();
  Vec3 inv = Vec3::Zero();
  int r = 0;
  for (int i = 0; i < 3; ++i) {
    if (std::abs(lambda[i]) > cutoff) {
      inv[i] = 1.0 / lambda[i];
      ++r;
    }
  }
  if (rank) *rank = r;
  return eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();
}

RayFit lsq_point_from_rays(std::span<const LandmarkRay> rays, NormalEquationSign sign) {
  if (rays.size() < 2) throw std::invalid_argument("need at least two rays for a least-squares point");
  Mat3 s = Mat3::Zero();
  Vec3 c = Vec3::Zero();
  for (const auto& ray : rays) {
    const Mat3 term = ray.direction * ray.direction.transpose() - Mat3::Identity();
    s += term;
    c += term * ray.origin;
  }
  if (sign == NormalEquationSign::Negated) {
    s = -s;
    c = -c;
  }
  RayFit fit;
  fit.point = pseudo_inverse_symmetric(s, 1e-9, &fit.rank) * c;
  fit.ok = fit.rank == 3;
  return fit;
}

void validate(const RansacConfig& c) {
  if (c.iterations < 1) throw std::invalid_argument("RANSAC needs at least one iteration");
  if (!(c.inlier_threshold > 0.0)) throw std::invalid_argument("RANSAC inlier threshold must be positive");
  if (c.min_inliers < 3) throw std::invalid_argument("RANSAC min_inliers must be at least 3");
}

RansacResult ransac_consensus(std::span<const LandmarkRay> rays, const RansacConfig& config) {
  validate(config);
  const std::size_t n = rays.size();
  if (n < static_cast<std::size_t>(config.min_inliers)) {
    throw std::invalid_argument("RANSAC needs at least min_inliers rays");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::tie(rays[a].view_id, rays[a].landmark_id) < std::tie(rays[b].view_id, rays[b].landmark_id);
  });
  std::vector<LandmarkRay> sorted(n);
  for (std::size_t i = 0; i < n; ++i) sorted[i] = rays[order[i]];

  const double thr2 = config.inlier_threshold * config.inlier_threshold;
  std::mt19937_64 rng(config.rng_seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);

  std::vector<std::size_t> best_inliers;
  double best_sq = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> inliers;
  std::array<LandmarkRay, 3> sample;
  for (int it = 0; it < config.iterations; ++it) {
    std::size_t i = pick(rng), j = pick(rng), k = pick(rng);
    while (j == i) j = pick(rng);
    while (k == i || k == j) k = pick(rng);
    sample = {sorted[i], sorted[j], sorted[k]};
    const RayFit hyp = lsq_point_from_rays(sample);
    if (!hyp.ok) continue;

    inliers.clear();
    double sq = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      const double d2 = point_to_ray_sqdist(hyp.point, sorted[r]);
      if (d2 < thr2) {
        inliers.push_back(r);
        sq += d2;
      }
    }
    // Equal counts: the lower mean squared residual wins.
    if (inliers.size() > best_inliers.size() || (inliers.size() == best_inliers.size() && sq < best_sq)) {
      best_inliers = inliers;
      best_sq = sq;
    }
  }

  RansacResult result;
  if (best_inliers.size() < static_cast<std::size_t>(config.min_inliers)) return result;

  std::vector<LandmarkRay> inlier_rays;
  inlier_rays.reserve(best_inliers.size());
  for (auto r : best_inliers) inlier_rays.push_back(sorted[r]);
  const RayFit refit = lsq_point_from_rays(inlier_rays);
  if (!refit.ok) return result;

  result.point = refit.point;
  result.rms_residual = std::sqrt(sum_sq_ray_distance(refit.point, inlier_rays) / inlier_rays.size());
  for (auto r : best_inliers) result.inliers.push_back(order[r]);
  std::sort(result.inliers.begin(), result.inliers.end());
  result.ok = true;
  return result;
}

namespace {

struct LandmarkJob {
  int landmark_id;
  std::vector<LandmarkRay> rays;
};

std::vector<LandmarkJob> gather_rays(std::span<const CameraSpec> cameras, std::span<const Detection2D> detections,
                                     std::span<const int> expected_ids) {
  std::map<int, std::vector<LandmarkRay>> grouped;
  for (int id : expected_ids) grouped[id];
  for (const auto& d : detections) {
    if (d.view_id < 0 || static_cast<std::size_t>(d.view_id) >= cameras.size()) {
      throw std::invalid_argument("detection references view " + std::to_string(d.view_id) + " but only " +
                                  std::to_string(cameras.size()) + " cameras exist");
    }
    grouped[d.landmark_id].push_back(back_project(cameras[d.view_id], d.view_id, d));
  }
  std::vector<LandmarkJob> jobs;
  jobs.reserve(grouped.size());
  for (auto& [id, rays] : grouped) jobs.push_back({id, std::move(rays)});
  return jobs;
}

std::uint64_t landmark_seed(std::uint64_t seed, int landmark_id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(landmark_id), 0x52414e53u};
  std::array<std::uint32_t, 2> out;
  seq.generate(out.begin(), out.end());
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

ConsensusResult place_one(const Octree& octree, const LandmarkJob& job, const RansacConfig& config) {
  ConsensusResult res;
  res.landmark_id = job.landmark_id;
  res.ray_count_used = static_cast<int>(job.rays.size());
  if (job.rays.size() < static_cast<std::size_t>(config.min_inliers)) return res;

  RansacConfig local = config;
  local.rng_seed = landmark_seed(config.rng_seed, job.landmark_id);
  const RansacResult r = ransac_consensus(job.rays, local);
  if (!r.ok) return res;

  res.status = LandmarkStatus::Resolved;
  res.point = r.point;
  res.surface_point = octree.closest_point(r.point).point;
  res.rms_residual = r.rms_residual;
  for (auto i : r.inliers) res.inlier_view_ids.push_back(job.rays[i].view_id);
  std::sort(res.inlier_view_ids.begin(), res.inlier_view_ids.end());
  return res;
}

}  // namespace

std::vector<ConsensusResult> place_landmarks(const Octree& octree, std::span<const CameraSpec> cameras,
                                             std::span<const Detection2D> detections, const RansacConfig& config,
                                             std::span<const int> expected_ids) {
  validate(config);
  const auto jobs = gather_rays(cameras, detections, expected_ids);
  std::vector<ConsensusResult> results(jobs.size());
  const auto n = static_cast<std::ptrdiff_t>(jobs.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) results[i] = place_one(octree, jobs[i], config);
  return results;
}

namespace serial {
std::vector<ConsensusResult> place_landmarks(const Octree& octree, std::span<const CameraSpec> cameras,
                                             std::span<const Detection2D> detections, const RansacConfig& config,
                                             std::span<const int> expected_ids) {
  validate(config);
  std::vector<ConsensusResult> results;
  for (const auto& job : gather_rays(cameras, detections, expected_ids)) {
    results.push_back(place_one(octree, job, config));
  }
  return results;
}
}  // namespace serial

std::string to_string(LandmarkStatus s) { return s == LandmarkStatus::Resolved ? "resolved" : "absent"; }

Json to_json(const ConsensusResult& r) {
  Json j{{"landmark_id", r.landmark_id},
         {"status", to_string(r.status)},
         {"inlier_views", r.inlier_view_ids},
         {"rms_residual", r.rms_residual},
         {"ray_count", r.ray_count_used}};
  if (r.resolved()) {
    j["p"] = vec_to_json(r.point);
    j["surface_point"] = vec_to_json(r.surface_point);
  } else {
    j["p"] = nullptr;
    j["surface_point"] = nullptr;
  }
  return j;
}

ConsensusResult consensus_result_from_json(const Json& j) {
  try {
    ConsensusResult r;
    r.landmark_id = j.at("landmark_id").get<int>();
    r.status = j.at("status").get<std::string>() == "resolved" ? LandmarkStatus::Resolved : LandmarkStatus::Absent;
    r.inlier_view_ids = j.value("inlier_views", std::vector<int>{});
    r.rms_residual = j.value("rms_residual", 0.0);
    r.ray_count_used = j.value("ray_count", 0);
    if (r.resolved()) {
      r.point = vec_from_json(j.at("p"));
      r.surface_point = vec_from_json(j.at("surface_point"));
    }
    return r;
  } catch (const Json::exception& e) {
    throw InputError(std::string("malformed consensus result: ") + e.what());
  }
}

Json results_to_json(std::span<const ConsensusResult> results) {
  Json arr = Json::array();
  for (const auto& r : results) arr.push_back(to_json(r));
  return Json{{"landmarks", arr}};
}

std::vector<ConsensusResult> results_from_json(const Json& doc) {
  if (!doc.contains("landmarks") || !doc["landmarks"].is_array()) {
    throw InputError("results document has no 'landmarks' array");
  }
  std::vector<ConsensusResult> out;
  for (const auto& j : doc["landmarks"]) out.push_back(consensus_result_from_json(j));
  return out;
}

}  // namespace mvlm
