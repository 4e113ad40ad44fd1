// Command-line driver: dataset export, landmark placement, evaluation and
// view-count sweeps.
//
// Exit codes: 0 success, 2 bad input, 3 pipeline failure.

#include "CLI11.hpp"

#include "mvlm/consensus.hpp"
#include "mvlm/export.hpp"
#include "mvlm/pipeline.hpp"
#include "mvlm/shapes.hpp"

#include <cstdio>
#include <iostream>
#include <sstream>

namespace {

using namespace mvlm;
namespace fs = std::filesystem;

constexpr int kExitInput = 2;
constexpr int kExitPipeline = 3;

Vec3 parse_vec3(const std::string& s) {
  std::stringstream ss(s);
  std::string item;
  std::vector<double> v;
  while (std::getline(ss, item, ',')) {
    try {
      v.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw InputError("bad vector component '" + item + "'");
    }
  }
  if (v.size() != 3) throw InputError("expected x,y,z but got '" + s + "'");
  return Vec3(v[0], v[1], v[2]);
}

std::vector<int> parse_int_list(const std::string& s) {
  std::stringstream ss(s);
  std::string item;
  std::vector<int> out;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw InputError("bad integer '" + item + "'");
    }
  }
  return out;
}

// Flags shared by place and sweep.
struct SharedOptions {
  std::string mesh;
  std::string landmarks;
  std::string out = ".";
  int views = 100;
  std::uint64_t seed = 0;
  double cap_angle = 60.0;
  std::string frontal = "0,0,1";
  std::string channels = "geometry,depth";
  double curvature_radius = kDefaultCurvatureRadius;
  std::string detector = "oracle";
  std::string heatmaps;
  std::string detections;
  std::string cameras;
  double threshold = kDefaultHeatmapThreshold;
  double oracle_noise = 0.0;
  double oracle_outlier_rate = 0.0;
  double oracle_outlier_spread = 40.0;
  double oracle_dropout = 0.0;
  int ransac_iters = 500;
  double ransac_threshold = 2.0;
  int min_inliers = 3;

  void add_to(CLI::App* app, bool mesh_required) {
    app->add_option("--mesh", mesh, "Input mesh (.obj or .ply)")->required(mesh_required);
    app->add_option("--landmarks", landmarks, "Ground-truth landmarks JSON");
    app->add_option("--out", out, "Output directory");
    app->add_option("--views", views, "Number of rendered views")->check(CLI::PositiveNumber);
    app->add_option("--seed", seed, "Seed for camera sampling, the oracle and RANSAC");
    app->add_option("--cap-angle", cap_angle, "Half angle in degrees of the camera cap")->check(CLI::Range(0.0, 180.0));
    app->add_option("--frontal", frontal, "Approximate facing direction x,y,z");
    app->add_option("--channels", channels, "Channels to render: rgb,geometry,depth,curvature");
    app->add_option("--curvature-radius", curvature_radius, "Curvature neighbourhood radius in mm");
    app->add_option("--detector", detector, "oracle or heatmaps")->check(CLI::IsMember({"oracle", "heatmaps"}));
    app->add_option("--heatmaps", heatmaps, "Directory of exported metadata.jsonl and .hmp stacks");
    app->add_option("--detections", detections, "Precomputed detections (JSON lines); needs --cameras");
    app->add_option("--cameras", cameras, "View metadata JSON lines holding the cameras");
    app->add_option("--threshold", threshold, "Heatmap maximum threshold");
    app->add_option("--oracle-noise", oracle_noise, "Oracle pixel noise sigma");
    app->add_option("--oracle-outlier-rate", oracle_outlier_rate, "Oracle outlier probability");
    app->add_option("--oracle-outlier-spread", oracle_outlier_spread, "Oracle outlier displacement in pixels");
    app->add_option("--oracle-dropout", oracle_dropout, "Oracle missed-detection probability");
    app->add_option("--ransac-iters", ransac_iters, "RANSAC iterations")->check(CLI::PositiveNumber);
    app->add_option("--ransac-threshold", ransac_threshold, "RANSAC inlier distance in mm");
    app->add_option("--min-inliers", min_inliers, "Minimum RANSAC inliers");
  }

  PipelineConfig config() const {
    PipelineConfig c;
    c.sampling.view_count = views;
    c.sampling.rng_seed = seed;
    c.sampling.cap_half_angle_deg = cap_angle;
    c.sampling.frontal_axis = parse_vec3(frontal);
    c.render.channels = parse_channels(channels);
    c.curvature_radius = curvature_radius;
    c.oracle = OracleConfig{oracle_noise, oracle_outlier_rate, oracle_outlier_spread, oracle_dropout, seed};
    c.ransac = RansacConfig{ransac_iters, ransac_threshold, min_inliers, seed};
    c.heatmap_threshold = threshold;
    if (!detections.empty()) {
      if (cameras.empty()) throw InputError("--detections needs --cameras");
      c.detector = DetectorKind::Precomputed;
      c.detections_file = detections;
      c.cameras_file = cameras;
    } else if (detector == "heatmaps") {
      if (heatmaps.empty()) throw InputError("--detector heatmaps needs --heatmaps DIR");
      c.detector = DetectorKind::Heatmaps;
      c.heatmap_dir = heatmaps;
    }
    try {
      validate(c.oracle);
      validate(c.ransac);
    } catch (const std::invalid_argument& e) {
      throw InputError(e.what());
    }
    return c;
  }
};

int run_render_export(const SharedOptions& o, double sigma) {
  const TriangleMesh mesh = load_mesh(o.mesh);
  LandmarkSet gt;
  if (!o.landmarks.empty()) gt = load_landmarks(o.landmarks);
  const PipelineConfig cfg = o.config();

  fs::create_directories(o.out);
  const auto cameras = sample_cameras(mesh, cfg.sampling);
  const bool curvature = std::ranges::find(cfg.render.channels, Channel::Curvature) != cfg.render.channels.end();
  CurvatureField field;
  if (curvature) {
    field = estimate_curvature_field(mesh, cfg.curvature_radius);
    write_curvature_sidecar(field, fs::path(o.out) / "curvature.crv");
  }
  const auto views = render_views(mesh, cameras, cfg.render, curvature ? &field : nullptr);
  std::vector<Json> metadata;
  for (const auto& v : views) metadata.push_back(export_training_view(v, gt.entries, sigma, o.out).metadata);
  write_jsonl(metadata, fs::path(o.out) / "metadata.jsonl");
  std::cout << "exported " << views.size() << " views to " << o.out << "\n";
  return 0;
}

int run_place(const SharedOptions& o) {
  const PipelineConfig cfg = o.config();
  const auto out = run_pipeline(o.mesh, o.landmarks, cfg);
  fs::create_directories(o.out);
  write_json(results_to_json(out.results), fs::path(o.out) / "results.json");
  write_detections(out.detections, fs::path(o.out) / "detections.jsonl");
  std::vector<Json> cams;
  for (std::size_t i = 0; i < out.cameras.size(); ++i) {
    cams.push_back(Json{{"view_id", static_cast<int>(i)}, {"camera", out.cameras[i]}});
  }
  write_jsonl(cams, fs::path(o.out) / "cameras.jsonl");

  int resolved = 0;
  for (const auto& r : out.results) resolved += r.resolved() ? 1 : 0;
  std::cout << "placed " << resolved << " of " << out.results.size() << " landmarks\n";
  if (out.report) {
    write_json(to_json(*out.report), fs::path(o.out) / "report.json");
    std::printf("mean error %.4f mm, missing %d\n", out.report->overall_mean_mm, out.report->missing);
  }
  return 0;
}

int run_evaluate(const std::vector<std::string>& results, const std::vector<std::string>& landmarks,
                 const std::string& out) {
  if (results.size() != landmarks.size()) throw InputError("give one --landmarks file per --results file");
  std::vector<SurfaceErrors> surfaces;
  LandmarkSet names;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto res = results_from_json(read_json(results[i]));
    const auto gt = load_landmarks(landmarks[i]);
    if (i == 0) names = gt;
    surfaces.push_back(landmark_errors(res, gt));
  }
  const auto report = summarize(surfaces, names);
  const Json j = to_json(report);
  if (!out.empty()) write_json(j, out);
  std::cout << j.dump(2) << "\n";
  return 0;
}

int run_sweep(const SharedOptions& o, const std::string& counts) {
  const TriangleMesh mesh = load_mesh(o.mesh);
  if (o.landmarks.empty()) throw InputError("sweep needs --landmarks");
  const LandmarkSet gt = load_landmarks(o.landmarks);
  const auto view_counts = parse_int_list(counts);
  const auto rows = view_sweep(mesh, gt, view_counts, o.config());
  fs::create_directories(o.out);
  write_json(sweep_to_json(rows), fs::path(o.out) / "sweep.json");
  std::printf("%8s %16s %8s\n", "views", "mean_error_mm", "missing");
  for (const auto& r : rows) std::printf("%8d %16.4f %8d\n", r.view_count, r.mean_error_mm, r.missing);
  return 0;
}

int run_synth(const std::string& out, int subdivisions, double radius) {
  fs::create_directories(out);
  const auto mesh = shapes::icosphere(subdivisions, radius);
  save_ply(mesh, fs::path(out) / "icosphere.ply");
  LandmarkSet gt;
  gt.schema_name = "icosahedron-12";
  for (int i = 0; i < 12; ++i) gt.entries.push_back(Landmark3D{i, "corner_" + std::to_string(i), mesh.vertices[i]});
  save_landmarks(gt, fs::path(out) / "landmarks.json");
  std::cout << "wrote " << (fs::path(out) / "icosphere.ply").string() << " and landmarks.json\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-view landmark placement on triangle meshes"};
  app.require_subcommand(1);

  SharedOptions render_opts;
  double sigma = kDefaultHeatmapSigma;
  auto* render = app.add_subcommand("render-export", "Render views and export a training dataset");
  render_opts.add_to(render, true);
  render->add_option("--sigma", sigma, "Heatmap Gaussian sigma in pixels")->check(CLI::PositiveNumber);

  SharedOptions place_opts;
  auto* place = app.add_subcommand("place", "Place landmarks end to end");
  place_opts.add_to(place, true);

  std::vector<std::string> eval_results, eval_landmarks;
  std::string eval_out;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score placed landmarks against ground truth");
  evaluate_cmd->add_option("--results", eval_results, "results.json from place (repeatable)")->required();
  evaluate_cmd->add_option("--landmarks", eval_landmarks, "Ground truth per results file (repeatable)")->required();
  evaluate_cmd->add_option("--out", eval_out, "Write the report JSON here");

  SharedOptions sweep_opts;
  std::string counts = "25,50,75,100";
  auto* sweep = app.add_subcommand("sweep", "Mean error as a function of view count");
  sweep_opts.add_to(sweep, true);
  sweep->add_option("--counts", counts, "Comma separated view counts");

  std::string synth_out = ".";
  int synth_level = 3;
  double synth_radius = 100.0;
  auto* synth = app.add_subcommand("synth", "Write an icosphere test mesh with 12 corner landmarks");
  synth->add_option("--out", synth_out, "Output directory");
  synth->add_option("--subdivisions", synth_level, "Subdivision level")->check(CLI::Range(0, 7));
  synth->add_option("--radius", synth_radius, "Sphere radius in mm")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (*render) return run_render_export(render_opts, sigma);
    if (*place) return run_place(place_opts);
    if (*evaluate_cmd) return run_evaluate(eval_results, eval_landmarks, eval_out);
    if (*sweep) return run_sweep(sweep_opts, counts);
    if (*synth) return run_synth(synth_out, synth_level, synth_radius);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const PipelineError& e) {
    std::cerr << "pipeline failure in " << e.stage() << ": " << e.what() << "\n";
    return kExitPipeline;
  } catch (const std::exception& e) {
    std::cerr << "pipeline failure: " << e.what() << "\n";
    return kExitPipeline;
  }
  return 0;
}
