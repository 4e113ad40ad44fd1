#pragma once

#include "mvlm/consensus.hpp"
#include "mvlm/detector.hpp"
#include "mvlm/landmarks.hpp"
#include "mvlm/octree.hpp"
#include "mvlm/render.hpp"

#include <filesystem>
#include <optional>
#include <span>
#include <vector>

namespace mvlm {

// ---- evaluation -----------------------------------------------------------

struct LandmarkErrorStats {
  int landmark_id = 0;
  std::string name;
  double mean_error_mm = 0.0;
  double sd_error_mm = 0.0;  // sample standard deviation, 0 when n < 2
  int n = 0;
};

struct EvaluationReport {
  std::vector<LandmarkErrorStats> per_landmark;  // ascending id
  double overall_mean_mm = 0.0;                  // over every measured error
  int missing = 0;                               // ground-truth landmarks without a placement
  int meshes = 0;
};

// Localisation errors of one surface: Euclidean distance between each placed
// landmark (its surface point) and the ground truth with the same id.
struct SurfaceErrors {
  std::vector<std::pair<int, double>> errors;  // (landmark id, mm), ascending id
  int missing = 0;
};

SurfaceErrors landmark_errors(std::span<const ConsensusResult> results, const LandmarkSet& gt);
SurfaceErrors landmark_errors(const LandmarkSet& estimate, const LandmarkSet& gt);

// Aggregates per-surface errors; `names` supplies landmark names for the report.
EvaluationReport summarize(std::span<const SurfaceErrors> surfaces, const LandmarkSet& names);

EvaluationReport evaluate(std::span<const ConsensusResult> results, const LandmarkSet& gt);
EvaluationReport evaluate(const LandmarkSet& estimate, const LandmarkSet& gt);

Json to_json(const EvaluationReport& report);

// Resolved placements as a landmark set (surface points), names from `names`.
LandmarkSet to_landmark_set(std::span<const ConsensusResult> results, const LandmarkSet& names);

// ---- end-to-end -----------------------------------------------------------

enum class DetectorKind { Oracle, Heatmaps, Precomputed };

struct PipelineConfig {
  ViewSamplingConfig sampling;
  RenderOptions render;
  double curvature_radius = kDefaultCurvatureRadius;
  OctreeOptions octree;

  DetectorKind detector = DetectorKind::Oracle;
  OracleConfig oracle;
  // Heatmap detector: directory holding metadata.jsonl and view_NNNN.hmp files
  // as written by the exporter. Cameras come from the metadata.
  std::filesystem::path heatmap_dir;
  double heatmap_threshold = kDefaultHeatmapThreshold;
  // Precomputed detections (JSON lines) with cameras from a metadata file.
  std::filesystem::path detections_file;
  std::filesystem::path cameras_file;

  RansacConfig ransac;
};

struct PipelineOutput {
  std::vector<CameraSpec> cameras;
  std::vector<Detection2D> detections;
  std::vector<ConsensusResult> results;
  std::optional<EvaluationReport> report;  // when ground truth was supplied
};

// sample_cameras -> render_view per view -> detector -> place_landmarks ->
// evaluate. Errors surface as InputError or PipelineError prefixed with the
// failing stage.
PipelineOutput run_pipeline(const TriangleMesh& mesh, const LandmarkSet* gt, const PipelineConfig& config);
PipelineOutput run_pipeline(const std::filesystem::path& mesh_path, const std::filesystem::path& landmarks_path,
                            const PipelineConfig& config);

// Cameras listed in an exporter metadata file, indexed by view id.
std::vector<CameraSpec> read_cameras(const std::filesystem::path& metadata_jsonl);

struct SweepRow {
  int view_count = 0;
  double mean_error_mm = 0.0;
  int missing = 0;
};

// One camera pool of max(view_counts) views; each row uses its prefix.
std::vector<SweepRow> view_sweep(const TriangleMesh& mesh, const LandmarkSet& gt, std::span<const int> view_counts,
                                 const PipelineConfig& config);

Json sweep_to_json(std::span<const SweepRow> rows);

}  // namespace mvlm
