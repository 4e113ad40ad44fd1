#include "mvlm/heatmap.hpp"

#include "mvlm/types.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace mvlm {

void validate(const HeatmapStack& stack) {
  for (const auto& p : stack.planes) {
    if (p.width != stack.width || p.height != stack.height ||
        p.pixels.size() != static_cast<std::size_t>(stack.width) * stack.height) {
      throw InputError("heatmap plane size does not match the stack");
    }
    for (float v : p.pixels) {
      if (!std::isfinite(v)) throw InputError("heatmap holds a non-finite value");
    }
  }
}

void write_heatmaps(const HeatmapStack& stack, const std::filesystem::path& path) {
  validate(stack);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write heatmaps '" + path.string() + "'");
  const std::uint32_t header[3] = {static_cast<std::uint32_t>(stack.planes.size()),
                                   static_cast<std::uint32_t>(stack.width),
                                   static_cast<std::uint32_t>(stack.height)};
  out.write("HMP1", 4);
  out.write(reinterpret_cast<const char*>(header), sizeof(header));
  for (const auto& p : stack.planes) {
    out.write(reinterpret_cast<const char*>(p.pixels.data()),
              static_cast<std::streamsize>(p.pixels.size() * sizeof(float)));
  }
}

HeatmapStack read_heatmaps(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open heatmaps '" + path.string() + "'");
  char magic[4];
  std::uint32_t header[3];
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(header), sizeof(header));
  if (!in || std::memcmp(magic, "HMP1", 4) != 0) throw InputError("'" + path.string() + "' is not an HMP1 stack");
  HeatmapStack stack;
  stack.width = static_cast<int>(header[1]);
  stack.height = static_cast<int>(header[2]);
  for (std::uint32_t i = 0; i < header[0]; ++i) {
    Image plane(stack.width, stack.height);
    in.read(reinterpret_cast<char*>(plane.pixels.data()),
            static_cast<std::streamsize>(plane.pixels.size() * sizeof(float)));
    if (!in) throw InputError("truncated heatmap stack '" + path.string() + "'");
    stack.planes.push_back(std::move(plane));
  }
  validate(stack);
  return stack;
}

}  // namespace mvlm
