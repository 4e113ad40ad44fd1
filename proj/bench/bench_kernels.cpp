// OpenMP kernels against their serial references.
//
//   ./mvlm_bench --benchmark_filter=Render
//   OMP_NUM_THREADS=4 ./mvlm_bench

#include "mvlm/consensus.hpp"
#include "mvlm/curvature.hpp"
#include "mvlm/octree.hpp"
#include "mvlm/render.hpp"
#include "mvlm/shapes.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

using namespace mvlm;

const TriangleMesh& sphere() {
  static const TriangleMesh mesh = shapes::icosphere(5, 100.0);
  return mesh;
}

std::vector<CameraSpec> cameras(int count) {
  ViewSamplingConfig cfg;
  cfg.view_count = count;
  return sample_cameras(sphere(), cfg);
}

struct PlacementInput {
  Octree octree{sphere()};
  std::vector<CameraSpec> cams = cameras(100);
  std::vector<Detection2D> detections;

  PlacementInput() {
    std::vector<Landmark3D> lms;
    for (int i = 0; i < 73; ++i) lms.push_back({i, "", sphere().vertices[static_cast<std::size_t>(i) * 131]});
    const OracleConfig oc{2.0, 0.2, 40.0, 0.1, 1};
    for (int v = 0; v < static_cast<int>(cams.size()); ++v) {
      const auto d = oracle_detect(cams[v], v, lms, oc);
      detections.insert(detections.end(), d.begin(), d.end());
    }
  }
};

const PlacementInput& placement() {
  static const PlacementInput input;
  return input;
}

void BM_RenderViews(benchmark::State& state) {
  const auto cams = cameras(16);
  for (auto _ : state) benchmark::DoNotOptimize(render_views(sphere(), cams, {}));
}
void BM_RenderViewsSerial(benchmark::State& state) {
  const auto cams = cameras(16);
  for (auto _ : state) benchmark::DoNotOptimize(serial::render_views(sphere(), cams, {}));
}

void BM_CurvatureField(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(estimate_curvature_field(sphere(), 15.0));
}
void BM_CurvatureFieldSerial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(serial::estimate_curvature_field(sphere(), 15.0));
}

void BM_PlaceLandmarks(benchmark::State& state) {
  const auto& in = placement();
  for (auto _ : state) benchmark::DoNotOptimize(place_landmarks(in.octree, in.cams, in.detections, {}));
}
void BM_PlaceLandmarksSerial(benchmark::State& state) {
  const auto& in = placement();
  for (auto _ : state) benchmark::DoNotOptimize(serial::place_landmarks(in.octree, in.cams, in.detections, {}));
}

std::vector<Vec3> queries() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-150.0, 150.0);
  std::vector<Vec3> q(5000);
  for (auto& p : q) p = Vec3(u(rng), u(rng), u(rng));
  return q;
}

void BM_ClosestPoints(benchmark::State& state) {
  const auto& tree = placement().octree;
  const auto q = queries();
  for (auto _ : state) benchmark::DoNotOptimize(closest_surface_points(tree, q));
}
void BM_ClosestPointsSerial(benchmark::State& state) {
  const auto& tree = placement().octree;
  const auto q = queries();
  for (auto _ : state) benchmark::DoNotOptimize(serial::closest_surface_points(tree, q));
}

}  // namespace

BENCHMARK(BM_RenderViews)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_RenderViewsSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_CurvatureField)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_CurvatureFieldSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_PlaceLandmarks)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_PlaceLandmarksSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ClosestPoints)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ClosestPointsSerial)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
