#pragma once

#include "mvlm/image.hpp"

#include <filesystem>
#include <vector>

namespace mvlm {

/// One plane per landmark; plane i belongs to the i-th landmark of the set
/// the stack was produced for.
struct HeatmapStack {
  int width = 0;
  int height = 0;
  std::vector<Image> planes;

  std::size_t landmark_count() const { return planes.size(); }
};

// Throws InputError when planes disagree with the stack size or hold
// non-finite values.
void validate(const HeatmapStack& stack);

// "HMP1", then uint32 landmark count, width, height, then little-endian
// float32 planes in row-major order.
void write_heatmaps(const HeatmapStack& stack, const std::filesystem::path& path);
HeatmapStack read_heatmaps(const std::filesystem::path& path);

}  // namespace mvlm
