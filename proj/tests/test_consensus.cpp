#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "mvlm/consensus.hpp"
#include "test_support.hpp"

using namespace mvlm;
using namespace mvlm::testing;

namespace {

// Rays through `q`, each origin pushed sideways by up to `wobble` mm.
std::vector<LandmarkRay> bundle_through(std::mt19937_64& rng, const Vec3& q, int count, double wobble,
                                        int first_view = 0) {
  std::vector<LandmarkRay> rays;
  for (int i = 0; i < count; ++i) {
    const Vec3 dir = random_unit(rng);
    Vec3 side = random_in_ball(rng, wobble);
    side -= side.dot(dir) * dir;
    rays.push_back(ray_through(q + side, dir, first_view + i));
  }
  return rays;
}

double line_gap(const LandmarkRay& a, const LandmarkRay& b) {
  const Vec3 w = a.origin - b.origin;
  const Vec3 cross = a.direction.cross(b.direction);
  return std::abs(w.dot(cross)) / cross.norm();
}

std::vector<CameraSpec> ring_cameras(const TriangleMesh& mesh, int count, std::uint64_t seed) {
  ViewSamplingConfig cfg;
  cfg.view_count = count;
  cfg.rng_seed = seed;
  return sample_cameras(mesh, cfg);
}

}  // namespace

TEST_CASE("point to ray distance examples") {
  const LandmarkRay ray{Vec3::Zero(), Vec3(1, 0, 0)};
  CHECK(point_to_ray_sqdist(Vec3(5, 3, 4), ray) == doctest::Approx(25.0));
  CHECK(point_to_ray_sqdist(Vec3(-7, 0, 0), ray) == 0.0);
  CHECK(point_to_ray_sqdist(Vec3(1e8, 1e-4, 0), ray) >= 0.0);

  std::mt19937_64 rng(1);
  for (int i = 0; i < 1000; ++i) {
    const LandmarkRay r{random_in_ball(rng, 100.0), random_unit(rng)};
    const Vec3 p = random_in_ball(rng, 100.0);
    const double expect = rejection_sqdist(p, r);
    CHECK(std::abs(point_to_ray_sqdist(p, r) - expect) <= 1e-12 * std::max(1.0, expect) * 1e3);
  }
}

TEST_CASE("orthogonal rays meet at the origin") {
  const std::vector<LandmarkRay> rays = {{Vec3(-5, 0, 0), Vec3(1, 0, 0)}, {Vec3(0, -5, 0), Vec3(0, 1, 0)}};
  const auto fit = lsq_point_from_rays(rays);
  CHECK(fit.ok);
  CHECK(fit.point.norm() < 1e-12);
}

TEST_CASE("offset orthogonal rays match grid search and numeric minimiser") {
  const std::vector<LandmarkRay> rays = {
      {Vec3(0, 1, 0), Vec3(1, 0, 0)}, {Vec3(0, 0, 1), Vec3(0, 1, 0)}, {Vec3(1, 0, 0), Vec3(0, 0, 1)}};
  const double step = 0.02;
  Vec3 best = Vec3::Zero();
  double best_f = std::numeric_limits<double>::infinity();
  for (double x = -1.0; x <= 2.0; x += step) {
    for (double y = -1.0; y <= 2.0; y += step) {
      for (double z = -1.0; z <= 2.0; z += step) {
        const double f = ray_objective(Vec3(x, y, z), rays);
        if (f < best_f) {
          best_f = f;
          best = Vec3(x, y, z);
        }
      }
    }
  }
  const auto fit = lsq_point_from_rays(rays);
  CHECK(fit.ok);
  CHECK((fit.point - best).cwiseAbs().maxCoeff() <= step);
  const Vec3 refined = numeric_ray_minimizer(rays, best);
  CHECK((fit.point - refined).norm() < 1e-9);
  CHECK((fit.point - Vec3(0.5, 0.5, 0.5)).norm() < 1e-12);
}

TEST_CASE("random bundles match the numeric minimiser") {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> count(3, 100);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<LandmarkRay> rays;
    const int n = count(rng);
    for (int i = 0; i < n; ++i) rays.push_back(LandmarkRay{random_in_ball(rng, 100.0), random_unit(rng)});
    const auto fit = lsq_point_from_rays(rays);
    REQUIRE(fit.ok);
    CHECK((fit.point - numeric_ray_minimizer(rays, Vec3::Zero())).norm() < 1e-6);
    const double scale = ray_objective(fit.point, rays) + 1.0;
    CHECK(fd_gradient(fit.point, rays, 1e-3).norm() < 1e-6 * scale);
  }
}

TEST_CASE("parallel rays are rank deficient and land on the midline") {
  const std::vector<LandmarkRay> rays = {{Vec3(3, -1, 2), Vec3(1, 0, 0)}, {Vec3(7, 1, 2), Vec3(-1, 0, 0)}};
  const auto fit = lsq_point_from_rays(rays);
  CHECK_FALSE(fit.ok);
  CHECK(fit.rank == 2);
  CHECK((fit.point - Vec3(0, 0, 2)).norm() < 1e-12);
  CHECK(std::sqrt(point_to_ray_sqdist(fit.point, rays[0])) == doctest::Approx(1.0));
  CHECK_THROWS_AS(lsq_point_from_rays(std::span(rays).first(1)), std::invalid_argument);
}

TEST_CASE("both sign conventions give the same point") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const auto rays = bundle_through(rng, random_in_ball(rng, 50.0), 3 + trial % 20, 5.0);
    const auto a = lsq_point_from_rays(rays, NormalEquationSign::AsWritten);
    const auto b = lsq_point_from_rays(rays, NormalEquationSign::Negated);
    CHECK((a.point - b.point).norm() <= 1e-12 * std::max(1.0, a.point.norm()));
  }
}

TEST_CASE("pseudo-inverse satisfies the Moore-Penrose conditions") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const Vec3 u = random_unit(rng);
    const Vec3 v = random_unit(rng);
    const Mat3 m = trial % 2 ? Mat3(u * u.transpose() + 2.0 * v * v.transpose()) : Mat3(3.0 * u * u.transpose());
    int rank = 0;
    const Mat3 pinv = pseudo_inverse_symmetric(m, 1e-9, &rank);
    CHECK(rank == (trial % 2 ? 2 : 1));
    CHECK((m * pinv * m - m).norm() < 1e-12);
    CHECK((pinv * m * pinv - pinv).norm() < 1e-12);
    CHECK(((m * pinv).transpose() - m * pinv).norm() < 1e-12);
  }
  CHECK(pseudo_inverse_symmetric(Mat3::Zero()).norm() == 0.0);
}

TEST_CASE("least squares point moves rigidly with the rays") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const auto rays = bundle_through(rng, random_in_ball(rng, 50.0), 12, 3.0);
    const Mat3 rot = random_rotation(rng);
    const Vec3 t = random_in_ball(rng, 200.0);
    auto moved = rays;
    for (auto& r : moved) {
      r.origin = rot * r.origin + t;
      r.direction = rot * r.direction;
    }
    const Vec3 expect = rot * lsq_point_from_rays(rays).point + t;
    CHECK((lsq_point_from_rays(moved).point - expect).norm() < 1e-9);

    RansacConfig cfg;
    cfg.rng_seed = 17;
    const auto a = ransac_consensus(rays, cfg);
    const auto b = ransac_consensus(moved, cfg);
    CHECK(a.inliers == b.inliers);
    CHECK((b.point - (rot * a.point + t)).norm() < 1e-9);
  }
}

TEST_CASE("a ray through the solution does not move it") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    auto rays = bundle_through(rng, random_in_ball(rng, 50.0), 8, 4.0);
    const Vec3 p = lsq_point_from_rays(rays).point;
    rays.push_back(ray_through(p, random_unit(rng), 99));
    CHECK((lsq_point_from_rays(rays).point - p).norm() < 1e-9);
  }
}

TEST_CASE("back projection follows the camera") {
  const auto cam = CameraSpec::look_at(Vec3(0, 0, 100), Vec3(1, 2, 0), Vec3::UnitY(), 64.0, 64.0, 50.0, 150.0);
  const auto ray = back_project(cam, 5, Detection2D{3, 128.0, 128.0, 0.8, 5});
  CHECK(ray.landmark_id == 3);
  CHECK(ray.view_id == 5);
  CHECK(ray.confidence == 0.8);
  CHECK((ray.direction - cam.forward()).norm() < 1e-15);
  CHECK(point_to_ray_sqdist(cam.focal_point, ray) < 1e-18);
  CHECK(std::abs(ray.direction.norm() - 1.0) < 1e-12);
  CHECK_THROWS_AS(back_project(cam, 4, Detection2D{3, 128.0, 128.0, 1.0, 5}), std::invalid_argument);

  std::mt19937_64 rng(7);
  for (int i = 0; i < 100; ++i) {
    const Vec3 p = Vec3(1, 2, 0) + random_in_ball(rng, 40.0);
    const auto ip = project_point(cam, p);
    const auto r = back_project(cam, 0, Detection2D{0, ip.u, ip.v, 1.0, 0});
    CHECK(std::sqrt(point_to_ray_sqdist(p, r)) < 1e-6);
    for (double s : {0.0, 37.0, 250.0}) {
      const auto back = project_point(cam, r.origin + s * r.direction);
      CHECK(std::abs(back.u - ip.u) < 1e-9);
      CHECK(std::abs(back.v - ip.v) < 1e-9);
    }
  }
}

TEST_CASE("two perpendicular cameras see rays that meet at the point") {
  const Vec3 p(4, -3, 7);
  const auto a = CameraSpec::look_at(Vec3(0, 0, 200), Vec3::Zero(), Vec3::UnitY(), 60.0, 60.0, 100.0, 300.0);
  const auto b = CameraSpec::look_at(Vec3(200, 0, 0), Vec3::Zero(), Vec3::UnitY(), 60.0, 60.0, 100.0, 300.0);
  const auto pa = project_point(a, p);
  const auto pb = project_point(b, p);
  const auto ra = back_project(a, 0, Detection2D{0, pa.u, pa.v, 1.0, 0});
  const auto rb = back_project(b, 1, Detection2D{0, pb.u, pb.v, 1.0, 1});
  CHECK(line_gap(ra, rb) < 1e-6);
  const std::vector<LandmarkRay> both = {ra, rb};
  CHECK((lsq_point_from_rays(both).point - p).norm() < 1e-6);
}

TEST_CASE("ransac on a clean bundle") {
  std::mt19937_64 rng(8);
  const Vec3 q(10, 20, 30);
  const auto rays = bundle_through(rng, q, 10, 0.0);
  const auto res = ransac_consensus(rays, {});
  CHECK(res.ok);
  CHECK((res.point - q).norm() < 1e-9);
  CHECK(res.inliers.size() == 10);
  CHECK(res.rms_residual < 1e-9);
}

TEST_CASE("ransac rejects a displaced cluster") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const Vec3 q = random_in_ball(rng, 50.0);
    auto rays = bundle_through(rng, q, 70, 0.5);
    const auto outliers = bundle_through(rng, q + 100.0 * random_unit(rng), 30, 0.0, 70);
    rays.insert(rays.end(), outliers.begin(), outliers.end());
    std::shuffle(rays.begin(), rays.end(), rng);
    RansacConfig cfg;
    cfg.rng_seed = static_cast<std::uint64_t>(trial);
    const auto res = ransac_consensus(rays, cfg);
    REQUIRE(res.ok);
    CHECK((res.point - q).norm() < 0.5);
    for (auto i : res.inliers) CHECK(rays[i].view_id < 70);
    CHECK(res.inliers.size() >= 60);
  }
}

TEST_CASE("ransac with exactly three rays equals the plain fit") {
  std::mt19937_64 rng(10);
  const auto rays = bundle_through(rng, Vec3(1, 1, 1), 3, 0.3);
  const auto res = ransac_consensus(rays, {});
  REQUIRE(res.ok);
  CHECK(res.inliers == std::vector<std::size_t>{0, 1, 2});
  CHECK((res.point - lsq_point_from_rays(rays).point).norm() < 1e-12);
}

TEST_CASE("ransac inputs and failure modes") {
  std::mt19937_64 rng(11);
  const auto rays = bundle_through(rng, Vec3::Zero(), 5, 0.0);
  RansacConfig cfg;
  cfg.min_inliers = 6;
  CHECK_THROWS_AS(ransac_consensus(rays, cfg), std::invalid_argument);
  cfg.min_inliers = 2;
  CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
  cfg = {};
  cfg.inlier_threshold = 0.0;
  CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
  cfg = {};
  cfg.iterations = 0;
  CHECK_THROWS_AS(validate(cfg), std::invalid_argument);

  // Pairwise far apart rays: no triple agrees, so no consensus.
  std::vector<LandmarkRay> scattered;
  for (int i = 0; i < 6; ++i) scattered.push_back(ray_through(Vec3(100.0 * i, 0, 0), random_unit(rng), i));
  cfg = {};
  cfg.min_inliers = 4;
  cfg.inlier_threshold = 0.1;
  CHECK_FALSE(ransac_consensus(scattered, cfg).ok);

  // All parallel: every hypothesis is rank deficient.
  std::vector<LandmarkRay> parallel;
  for (int i = 0; i < 5; ++i) parallel.push_back(ray_through(Vec3(0, i, 0), Vec3::UnitX(), i));
  CHECK_FALSE(ransac_consensus(parallel, {}).ok);
}

TEST_CASE("ransac is invariant to ray order") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    auto rays = bundle_through(rng, Vec3(0, 5, 0), 40, 1.5);
    const auto noise = bundle_through(rng, Vec3(50, 5, 0), 15, 20.0, 40);
    rays.insert(rays.end(), noise.begin(), noise.end());
    RansacConfig cfg;
    cfg.rng_seed = 5;
    const auto a = ransac_consensus(rays, cfg);
    std::vector<std::size_t> perm(rays.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<LandmarkRay> shuffled;
    for (auto i : perm) shuffled.push_back(rays[i]);
    const auto b = ransac_consensus(shuffled, cfg);
    std::set<int> va, vb;
    for (auto i : a.inliers) va.insert(rays[i].view_id);
    for (auto i : b.inliers) vb.insert(shuffled[i].view_id);
    CHECK(va == vb);
    CHECK((a.point - b.point).norm() < 1e-9);
  }
}

TEST_CASE("zero-noise oracle detections place landmarks on their vertices") {
  const auto sphere = shapes::icosphere(3, 80.0, Vec3(5, 0, -3));
  const auto tree = build_octree(sphere);
  const auto cams = ring_cameras(sphere, 100, 1);
  std::vector<Landmark3D> lms;
  for (int i = 0; i < 12; ++i) lms.push_back({i, "", sphere.vertices[i]});
  std::vector<Detection2D> dets;
  for (int v = 0; v < 100; ++v) {
    const auto d = oracle_detect(cams[v], v, lms, {});
    dets.insert(dets.end(), d.begin(), d.end());
  }
  const auto results = place_landmarks(tree, cams, dets, {});
  REQUIRE(results.size() == 12);
  for (const auto& r : results) {
    CHECK(r.resolved());
    CHECK(r.ray_count_used == 100);
    CHECK(r.inlier_view_ids.size() == 100);
    CHECK((r.surface_point - lms[r.landmark_id].position).norm() < 1e-3);
    CHECK((r.point - lms[r.landmark_id].position).norm() < 1e-3);
  }
}

TEST_CASE("landmarks below quorum or never seen are absent") {
  const auto sphere = shapes::icosphere(2, 50.0);
  const auto tree = build_octree(sphere);
  const auto cams = ring_cameras(sphere, 5, 2);
  const std::vector<Landmark3D> lms = {{0, "", sphere.vertices[0]}, {1, "", sphere.vertices[1]}};
  std::vector<Detection2D> dets;
  for (int v = 0; v < 5; ++v) {
    for (const auto& d : oracle_detect(cams[v], v, lms, {})) {
      if (d.landmark_id == 0 || v < 2) dets.push_back(d);
    }
  }
  const std::vector<int> expected = {0, 1, 9};
  const auto results = place_landmarks(tree, cams, dets, {}, expected);
  REQUIRE(results.size() == 3);
  CHECK(results[0].resolved());
  CHECK(results[1].landmark_id == 1);
  CHECK_FALSE(results[1].resolved());
  CHECK(results[1].ray_count_used == 2);
  CHECK(results[2].landmark_id == 9);
  CHECK_FALSE(results[2].resolved());
  CHECK(results[2].ray_count_used == 0);

  std::vector<Detection2D> bad = {Detection2D{0, 1.0, 1.0, 1.0, 7}};
  CHECK_THROWS_AS(place_landmarks(tree, cams, bad, {}), std::invalid_argument);
}

TEST_CASE("surface point is the closest point of the mesh") {
  std::mt19937_64 rng(13);
  const auto mesh = random_mesh(rng, 3);
  const auto tree = build_octree(mesh);
  const auto cams = ring_cameras(mesh, 40, 3);
  std::vector<Landmark3D> lms;
  for (int i = 0; i < 8; ++i) lms.push_back({i, "", mesh.bounds().center() + random_in_ball(rng, 30.0)});
  OracleConfig oc;
  oc.noise_sigma = 1.0;
  std::vector<Detection2D> dets;
  for (int v = 0; v < 40; ++v) {
    const auto d = oracle_detect(cams[v], v, lms, oc);
    dets.insert(dets.end(), d.begin(), d.end());
  }
  for (const auto& r : place_landmarks(tree, cams, dets, {})) {
    REQUIRE(r.resolved());
    const auto brute = closest_point_brute_force(mesh, r.point);
    CHECK((r.surface_point - r.point).norm() == doctest::Approx(brute.distance).epsilon(1e-12));
  }
}

TEST_CASE("parallel placement matches the serial reference") {
  std::mt19937_64 rng(14);
  const auto sphere = shapes::icosphere(3, 60.0);
  const auto tree = build_octree(sphere);
  const auto cams = ring_cameras(sphere, 60, 4);
  std::vector<Landmark3D> lms;
  for (int i = 0; i < 40; ++i) lms.push_back({i, "", sphere.vertices[i * 13]});
  OracleConfig oc;
  oc.noise_sigma = 2.0;
  oc.outlier_rate = 0.2;
  oc.dropout_rate = 0.1;
  oc.rng_seed = 77;
  std::vector<Detection2D> dets;
  for (int v = 0; v < 60; ++v) {
    const auto d = oracle_detect(cams[v], v, lms, oc);
    dets.insert(dets.end(), d.begin(), d.end());
  }
  RansacConfig cfg;
  cfg.rng_seed = 3;
  const auto a = place_landmarks(tree, cams, dets, cfg);
  const auto b = serial::place_landmarks(tree, cams, dets, cfg);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].point == b[i].point);
    CHECK(a[i].surface_point == b[i].surface_point);
    CHECK(a[i].inlier_view_ids == b[i].inlier_view_ids);
  }
  CHECK(results_to_json(a).dump() == results_to_json(b).dump());
}

TEST_CASE("consensus results round trip through json") {
  ConsensusResult ok;
  ok.landmark_id = 4;
  ok.status = LandmarkStatus::Resolved;
  ok.point = Vec3(1.5, -2.25, 3.0);
  ok.surface_point = Vec3(1.0, -2.0, 3.0);
  ok.inlier_view_ids = {0, 3, 9};
  ok.rms_residual = 0.125;
  ok.ray_count_used = 11;
  ConsensusResult gone;
  gone.landmark_id = 5;
  gone.ray_count_used = 1;
  const std::vector<ConsensusResult> all = {ok, gone};
  const Json doc = results_to_json(all);
  CHECK(doc["landmarks"][1]["p"].is_null());
  CHECK(doc["landmarks"][0]["status"] == "resolved");
  const auto back = results_from_json(Json::parse(doc.dump()));
  REQUIRE(back.size() == 2);
  CHECK(back[0].point == ok.point);
  CHECK(back[0].surface_point == ok.surface_point);
  CHECK(back[0].inlier_view_ids == ok.inlier_view_ids);
  CHECK(back[0].rms_residual == ok.rms_residual);
  CHECK_FALSE(back[1].resolved());
  CHECK(back[1].ray_count_used == 1);
  CHECK_THROWS_AS(results_from_json(Json::object()), InputError);
  CHECK_THROWS_AS(results_from_json(Json{{"landmarks", {Json{{"status", "absent"}}}}}), InputError);
}
