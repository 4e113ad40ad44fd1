#pragma once

#include "mvlm/heatmap.hpp"
#include "mvlm/landmarks.hpp"
#include "mvlm/render.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace mvlm {

inline constexpr double kDefaultHeatmapThreshold = 0.5;

struct Detection2D {
  int landmark_id = 0;
  double u = 0.0;
  double v = 0.0;
  double confidence = 1.0;
  int view_id = 0;

  bool operator==(const Detection2D&) const = default;
};

// Global argmax per plane; emitted at the pixel centre when the maximum
// exceeds `threshold`, with the maximum as confidence. Ties go to the first
// pixel in row-major order. `landmark_ids[i]` names plane i (plane index when
// empty).
std::vector<Detection2D> decode_heatmaps(const HeatmapStack& stack, double threshold = kDefaultHeatmapThreshold,
                                         int view_id = 0, std::span<const int> landmark_ids = {});

/// Stand-in for a trained network: perturbed projections of known landmarks.
struct OracleConfig {
  double noise_sigma = 0.0;      // px, isotropic Gaussian
  double outlier_rate = 0.0;     // probability of a gross error
  double outlier_spread = 40.0;  // px, outliers land uniformly in a disc this large
  double dropout_rate = 0.0;     // probability of no detection
  std::uint64_t rng_seed = 0;
};

void validate(const OracleConfig& config);

// Draws for each (view, landmark) come from their own seeded stream.
std::vector<Detection2D> oracle_detect(const CameraSpec& camera, int view_id, std::span<const Landmark3D> landmarks,
                                       const OracleConfig& config);
std::vector<Detection2D> oracle_detect(const RenderedView& view, std::span<const Landmark3D> landmarks,
                                       const OracleConfig& config);

// JSON lines: {"view_id", "landmark_id", "u", "v", "confidence"}.
void write_detections(std::span<const Detection2D> detections, const std::filesystem::path& path);
std::vector<Detection2D> read_detections(const std::filesystem::path& path);

}  // namespace mvlm
