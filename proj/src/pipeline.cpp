#include "mvlm/pipeline.hpp"

#include "mvlm/export.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

namespace mvlm {

// ---- evaluation -----------------------------------------------------------

namespace {

void require_overlap(const std::set<int>& estimated, const LandmarkSet& gt) {
  for (const auto& e : gt.entries) {
    if (estimated.contains(e.id)) return;
  }
  throw InputError("estimates and ground truth share no landmark ids");
}

}  // namespace

SurfaceErrors landmark_errors(std::span<const ConsensusResult> results, const LandmarkSet& gt) {
  std::set<int> ids;
  std::map<int, const ConsensusResult*> by_id;
  for (const auto& r : results) {
    ids.insert(r.landmark_id);
    by_id[r.landmark_id] = &r;
  }
  require_overlap(ids, gt);
  SurfaceErrors out;
  for (const auto& e : gt.entries) {
    auto it = by_id.find(e.id);
    if (it == by_id.end() || !it->second->resolved()) {
      ++out.missing;
      continue;
    }
    out.errors.emplace_back(e.id, (it->second->surface_point - e.position).norm());
  }
  std::sort(out.errors.begin(), out.errors.end());
  return out;
}

SurfaceErrors landmark_errors(const LandmarkSet& estimate, const LandmarkSet& gt) {
  std::set<int> ids;
  for (const auto& e : estimate.entries) ids.insert(e.id);
  require_overlap(ids, gt);
  SurfaceErrors out;
  for (const auto& e : gt.entries) {
    const Landmark3D* est = estimate.find(e.id);
    if (!est) {
      ++out.missing;
      continue;
    }
    out.errors.emplace_back(e.id, (est->position - e.position).norm());
  }
  std::sort(out.errors.begin(), out.errors.end());
  return out;
}

EvaluationReport summarize(std::span<const SurfaceErrors> surfaces, const LandmarkSet& names) {
  std::map<int, std::vector<double>> per_id;
  EvaluationReport report;
  report.meshes = static_cast<int>(surfaces.size());
  double total = 0.0;
  std::size_t count = 0;
  for (const auto& s : surfaces) {
    report.missing += s.missing;
    for (const auto& [id, err] : s.errors) {
      per_id[id].push_back(err);
      total += err;
      ++count;
    }
  }
  for (const auto& [id, errs] : per_id) {
    LandmarkErrorStats st;
    st.landmark_id = id;
    if (const auto* lm = names.find(id)) st.name = lm->name;
    st.n = static_cast<int>(errs.size());
    double sum = 0.0;
    for (double e : errs) sum += e;
    st.mean_error_mm = sum / st.n;
    if (st.n > 1) {
      double ss = 0.0;
      for (double e : errs) ss += (e - st.mean_error_mm) * (e - st.mean_error_mm);
      st.sd_error_mm = std::sqrt(ss / (st.n - 1));
    }
    report.per_landmark.push_back(st);
  }
  report.overall_mean_mm = count ? total / count : std::numeric_limits<double>::quiet_NaN();
  return report;
}

EvaluationReport evaluate(std::span<const ConsensusResult> results, const LandmarkSet& gt) {
  const SurfaceErrors s = landmark_errors(results, gt);
  return summarize(std::span(&s, 1), gt);
}

EvaluationReport evaluate(const LandmarkSet& estimate, const LandmarkSet& gt) {
  const SurfaceErrors s = landmark_errors(estimate, gt);
  return summarize(std::span(&s, 1), gt);
}

Json to_json(const EvaluationReport& report) {
  Json per = Json::array();
  for (const auto& s : report.per_landmark) {
    per.push_back(Json{{"landmark_id", s.landmark_id},
                       {"name", s.name},
                       {"mean_error_mm", s.mean_error_mm},
                       {"sd_error_mm", s.sd_error_mm},
                       {"n", s.n}});
  }
  Json j{{"per_landmark", per}, {"missing", report.missing}, {"meshes", report.meshes}};
  if (std::isfinite(report.overall_mean_mm)) j["overall_mean_mm"] = report.overall_mean_mm;
  else j["overall_mean_mm"] = nullptr;
  return j;
}

LandmarkSet to_landmark_set(std::span<const ConsensusResult> results, const LandmarkSet& names) {
  LandmarkSet set;
  set.schema_name = names.schema_name;
  for (const auto& r : results) {
    if (!r.resolved()) continue;
    const auto* lm = names.find(r.landmark_id);
    set.entries.push_back(Landmark3D{r.landmark_id, lm ? lm->name : std::string{}, r.surface_point});
  }
  return set;
}

// ---- end-to-end -----------------------------------------------------------

namespace {

template <typename F>
auto stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const InputError& e) {
    throw InputError(std::string(name) + ": " + e.what());
  } catch (const PipelineError&) {
    throw;
  } catch (const std::exception& e) {
    throw PipelineError(name, e.what());
  }
}

std::vector<int> landmark_ids(const LandmarkSet* gt) {
  std::vector<int> ids;
  if (gt) {
    for (const auto& e : gt->entries) ids.push_back(e.id);
  }
  return ids;
}

std::vector<Detection2D> detect_from_heatmaps(const PipelineConfig& config, const LandmarkSet* gt) {
  std::vector<Detection2D> out;
  for (const auto& rec : read_jsonl(config.heatmap_dir / "metadata.jsonl")) {
    const int view_id = rec.at("view_id").get<int>();
    const std::string file = rec.value("heatmaps", view_stem(view_id) + ".hmp");
    const HeatmapStack stack = read_heatmaps(config.heatmap_dir / file);
    std::vector<int> ids;
    if (rec.contains("gt_landmarks") && rec["gt_landmarks"].size() == stack.landmark_count()) {
      for (const auto& g : rec["gt_landmarks"]) ids.push_back(g.at("id").get<int>());
    } else if (gt && gt->entries.size() == stack.landmark_count()) {
      ids = landmark_ids(gt);
    }
    auto dets = decode_heatmaps(stack, config.heatmap_threshold, view_id, ids);
    out.insert(out.end(), dets.begin(), dets.end());
  }
  return out;
}

std::vector<Detection2D> oracle_detections(std::span<const RenderedView> views, const LandmarkSet& gt,
                                           const OracleConfig& config) {
  std::vector<std::vector<Detection2D>> per_view(views.size());
  const auto n = static_cast<std::ptrdiff_t>(views.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) per_view[i] = oracle_detect(views[i], gt.entries, config);
  std::vector<Detection2D> out;
  for (auto& v : per_view) out.insert(out.end(), v.begin(), v.end());
  return out;
}

struct Observations {
  std::vector<CameraSpec> cameras;
  std::vector<Detection2D> detections;
};

Observations observe(const TriangleMesh& mesh, const LandmarkSet* gt, const PipelineConfig& config) {
  Observations obs;
  switch (config.detector) {
    case DetectorKind::Oracle: {
      if (!gt) throw InputError("detector: the oracle detector needs ground-truth landmarks");
      obs.cameras = stage("sample_cameras", [&] { return sample_cameras(mesh, config.sampling); });
      const bool need_curvature = std::ranges::find(config.render.channels, Channel::Curvature) !=
                                  config.render.channels.end();
      const CurvatureField field = need_curvature
                                       ? stage("curvature", [&] { return estimate_curvature_field(mesh, config.curvature_radius); })
                                       : CurvatureField{};
      auto views = stage("render", [&] {
        return render_views(mesh, obs.cameras, config.render, need_curvature ? &field : nullptr);
      });
      for (auto& v : views) attach_ground_truth(v, gt->entries);
      obs.detections = stage("detector", [&] { return oracle_detections(views, *gt, config.oracle); });
      break;
    }
    case DetectorKind::Heatmaps:
      obs.cameras = stage("cameras", [&] { return read_cameras(config.heatmap_dir / "metadata.jsonl"); });
      obs.detections = stage("detector", [&] { return detect_from_heatmaps(config, gt); });
      break;
    case DetectorKind::Precomputed:
      obs.cameras = stage("cameras", [&] { return read_cameras(config.cameras_file); });
      obs.detections = stage("detector", [&] { return read_detections(config.detections_file); });
      break;
  }
  return obs;
}

}  // namespace

std::vector<CameraSpec> read_cameras(const std::filesystem::path& metadata_jsonl) {
  std::map<int, CameraSpec> by_id;
  for (const auto& rec : read_jsonl(metadata_jsonl)) {
    try {
      by_id[rec.at("view_id").get<int>()] = rec.at("camera").get<CameraSpec>();
    } catch (const Json::exception& e) {
      throw InputError("malformed view metadata in '" + metadata_jsonl.string() + "': " + e.what());
    }
  }
  std::vector<CameraSpec> cameras;
  for (const auto& [id, cam] : by_id) {
    if (id != static_cast<int>(cameras.size())) {
      throw InputError("view ids in '" + metadata_jsonl.string() + "' are not contiguous from 0");
    }
    cameras.push_back(cam);
  }
  return cameras;
}

PipelineOutput run_pipeline(const TriangleMesh& mesh, const LandmarkSet* gt, const PipelineConfig& config) {
  PipelineOutput out;
  auto obs = observe(mesh, gt, config);
  out.cameras = std::move(obs.cameras);
  out.detections = std::move(obs.detections);

  const Octree octree = stage("octree", [&] { return Octree(mesh, config.octree); });
  const auto ids = landmark_ids(gt);
  out.results = stage("consensus", [&] { return place_landmarks(octree, out.cameras, out.detections, config.ransac, ids); });
  if (gt) out.report = stage("evaluate", [&] { return evaluate(out.results, *gt); });
  return out;
}

PipelineOutput run_pipeline(const std::filesystem::path& mesh_path, const std::filesystem::path& landmarks_path,
                            const PipelineConfig& config) {
  const TriangleMesh mesh = stage("load_mesh", [&] { return load_mesh(mesh_path); });
  std::optional<LandmarkSet> gt;
  if (!landmarks_path.empty()) gt = stage("load_landmarks", [&] { return load_landmarks(landmarks_path); });
  return run_pipeline(mesh, gt ? &*gt : nullptr, config);
}

std::vector<SweepRow> view_sweep(const TriangleMesh& mesh, const LandmarkSet& gt, std::span<const int> view_counts,
                                 const PipelineConfig& config) {
  if (view_counts.empty()) throw InputError("sweep: no view counts given");
  const int max_views = *std::max_element(view_counts.begin(), view_counts.end());
  if (*std::min_element(view_counts.begin(), view_counts.end()) < 1) throw InputError("sweep: view counts must be >= 1");

  PipelineConfig pool = config;
  pool.sampling.view_count = max_views;
  const auto obs = observe(mesh, &gt, pool);
  if (config.detector != DetectorKind::Oracle && static_cast<int>(obs.cameras.size()) < max_views) {
    throw InputError("sweep: only " + std::to_string(obs.cameras.size()) + " views available");
  }
  const Octree octree = stage("octree", [&] { return Octree(mesh, config.octree); });
  const auto ids = landmark_ids(&gt);

  std::vector<SweepRow> rows;
  for (int count : view_counts) {
    std::vector<Detection2D> subset;
    for (const auto& d : obs.detections) {
      if (d.view_id < count) subset.push_back(d);
    }
    const std::span<const CameraSpec> cams(obs.cameras.data(), static_cast<std::size_t>(count));
    const auto results = stage("consensus", [&] { return place_landmarks(octree, cams, subset, config.ransac, ids); });
    const auto report = evaluate(results, gt);
    rows.push_back(SweepRow{count, report.overall_mean_mm, report.missing});
  }
  return rows;
}

Json sweep_to_json(std::span<const SweepRow> rows) {
  Json arr = Json::array();
  for (const auto& r : rows) {
    Json j{{"view_count", r.view_count}, {"missing", r.missing}};
    if (std::isfinite(r.mean_error_mm)) j["mean_error_mm"] = r.mean_error_mm;
    else j["mean_error_mm"] = nullptr;
    arr.push_back(j);
  }
  return Json{{"sweep", arr}};
}

}  // namespace mvlm
