#include "mvlm/export.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <memory>

namespace mvlm {
namespace {

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

void write_png(const std::filesystem::path& path, int width, int height, int color_type, int bit_depth,
               const std::vector<std::vector<png_byte>>& rows) {
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw InputError("cannot write '" + path.string() + "'");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw std::runtime_error("libpng initialisation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw std::runtime_error("libpng failed writing '" + path.string() + "'");
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), bit_depth, color_type,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (const auto& row : rows) png_write_row(png, row.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

png_byte to_u8(float v) { return static_cast<png_byte>(std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f)); }

}  // namespace

std::string view_stem(int view_id) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "view_%04d", view_id);
  return buf;
}

HeatmapStack make_heatmaps(const CameraSpec& camera, std::span<const Landmark3D> landmarks, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("heatmap sigma must be positive");
  HeatmapStack stack;
  stack.width = camera.image_width;
  stack.height = camera.image_height;
  const double inv_two_sigma2 = 1.0 / (2.0 * sigma * sigma);
  for (const auto& lm : landmarks) {
    Image plane(stack.width, stack.height);
    const auto ip = project_point(camera, lm.position);
    if (ip.inside(camera)) {
      for (int y = 0; y < stack.height; ++y) {
        const double dy = y + 0.5 - ip.v;
        for (int x = 0; x < stack.width; ++x) {
          const double dx = x + 0.5 - ip.u;
          plane.at(x, y) = static_cast<float>(std::exp(-(dx * dx + dy * dy) * inv_two_sigma2));
        }
      }
    }
    stack.planes.push_back(std::move(plane));
  }
  return stack;
}

Json view_metadata(const RenderedView& view) {
  Json gt = Json::array();
  for (const auto& p : view.gt_landmarks_2d) {
    gt.push_back(Json{{"id", p.landmark_id}, {"u", p.u}, {"v", p.v}, {"visible", p.visible}});
  }
  Json channels = Json::array();
  for (const auto& [c, _] : view.channels) channels.push_back(to_string(c));
  return Json{{"view_id", view.view_id}, {"camera", view.camera}, {"channels", channels}, {"gt_landmarks", gt}};
}

ExportedView export_training_view(const RenderedView& view, std::span<const Landmark3D> landmarks, double sigma,
                                  const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  ExportedView out;
  const std::string stem = view_stem(view.view_id);

  RenderedView annotated = view;
  attach_ground_truth(annotated, landmarks);

  for (const auto& [c, image] : view.channels) {
    if (c == Channel::Red || c == Channel::Green || c == Channel::Blue) continue;
    auto path = out_dir / (stem + "_" + to_string(c) + ".png");
    write_png_gray16(image, path);
    out.image_files.push_back(path);
  }
  if (view.channels.contains(Channel::Red) && view.channels.contains(Channel::Green) &&
      view.channels.contains(Channel::Blue)) {
    auto path = out_dir / (stem + "_rgb.png");
    write_png_rgb8(view.channel(Channel::Red), view.channel(Channel::Green), view.channel(Channel::Blue), path);
    out.image_files.push_back(path);
  }

  out.heatmaps = make_heatmaps(view.camera, landmarks, sigma);
  out.heatmap_file = out_dir / (stem + ".hmp");
  write_heatmaps(out.heatmaps, out.heatmap_file);

  out.metadata = view_metadata(annotated);
  out.metadata["sigma"] = sigma;
  out.metadata["heatmaps"] = out.heatmap_file.filename().string();
  return out;
}

void write_png_gray16(const Image& image, const std::filesystem::path& path) {
  std::vector<std::vector<png_byte>> rows(static_cast<std::size_t>(image.height));
  for (int y = 0; y < image.height; ++y) {
    auto& row = rows[y];
    row.resize(static_cast<std::size_t>(image.width) * 2);
    for (int x = 0; x < image.width; ++x) {
      const auto v = static_cast<std::uint16_t>(std::lround(std::clamp(image.at(x, y), 0.0f, 1.0f) * 65535.0));
      row[2 * x] = static_cast<png_byte>(v >> 8);  // PNG is big-endian
      row[2 * x + 1] = static_cast<png_byte>(v & 0xff);
    }
  }
  write_png(path, image.width, image.height, PNG_COLOR_TYPE_GRAY, 16, rows);
}

void write_png_rgb8(const Image& r, const Image& g, const Image& b, const std::filesystem::path& path) {
  std::vector<std::vector<png_byte>> rows(static_cast<std::size_t>(r.height));
  for (int y = 0; y < r.height; ++y) {
    auto& row = rows[y];
    row.resize(static_cast<std::size_t>(r.width) * 3);
    for (int x = 0; x < r.width; ++x) {
      row[3 * x] = to_u8(r.at(x, y));
      row[3 * x + 1] = to_u8(g.at(x, y));
      row[3 * x + 2] = to_u8(b.at(x, y));
    }
  }
  write_png(path, r.width, r.height, PNG_COLOR_TYPE_RGB, 8, rows);
}

Image read_png_gray16(const std::filesystem::path& path) {
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&img, path.c_str())) {
    throw InputError("cannot read PNG '" + path.string() + "'");
  }
  img.format = PNG_FORMAT_LINEAR_Y;  // 16-bit linear grey
  std::vector<std::uint16_t> buf(PNG_IMAGE_SIZE(img) / 2);
  if (!png_image_finish_read(&img, nullptr, buf.data(), 0, nullptr)) {
    png_image_free(&img);
    throw InputError("cannot decode PNG '" + path.string() + "'");
  }
  Image out(static_cast<int>(img.width), static_cast<int>(img.height));
  for (std::size_t i = 0; i < buf.size(); ++i) out.pixels[i] = static_cast<float>(buf[i] / 65535.0);
  return out;
}

}  // namespace mvlm
