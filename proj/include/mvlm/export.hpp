#pragma once

#include "mvlm/heatmap.hpp"
#include "mvlm/render.hpp"
#include "mvlm/serialization.hpp"

#include <filesystem>
#include <span>
#include <vector>

namespace mvlm {

inline constexpr double kDefaultHeatmapSigma = 5.0;  // pixels

// Gaussian ground-truth heatmaps, exp(-r^2 / (2 sigma^2)) sampled at pixel
// centres around each landmark's projection. Landmarks projecting outside the
// image or clip range get an all-zero plane.
HeatmapStack make_heatmaps(const CameraSpec& camera, std::span<const Landmark3D> landmarks, double sigma);

// Metadata record: view id, camera, and projected ground truth.
Json view_metadata(const RenderedView& view);

struct ExportedView {
  std::vector<std::filesystem::path> image_files;
  std::filesystem::path heatmap_file;
  HeatmapStack heatmaps;
  Json metadata;
};

// Writes view_NNNN_<channel>.png (16-bit grey), view_NNNN_rgb.png when the
// colour planes were rendered, and view_NNNN.hmp into `out_dir`. Attaches the
// projected ground truth to the returned metadata.
ExportedView export_training_view(const RenderedView& view, std::span<const Landmark3D> landmarks, double sigma,
                                  const std::filesystem::path& out_dir);

std::string view_stem(int view_id);

// PNG helpers. Grey planes store round(v * 65535).
void write_png_gray16(const Image& image, const std::filesystem::path& path);
void write_png_rgb8(const Image& r, const Image& g, const Image& b, const std::filesystem::path& path);
Image read_png_gray16(const std::filesystem::path& path);

}  // namespace mvlm
