#include "mvlm/render.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace mvlm {
namespace {

struct ScreenVertex {
  double x, y, z;
};

double edge(const ScreenVertex& a, const ScreenVertex& b, double px, double py) {
  return (b.x - a.x) * (py - a.y) - (b.y - a.y) * (px - a.x);
}

// Top-left fill rule for triangles with positive edge() area in y-down
// screen space: horizontal edges running +x are top edges, edges running -y
// are left edges.
bool is_top_left(const ScreenVertex& a, const ScreenVertex& b) {
  const double ex = b.x - a.x;
  const double ey = b.y - a.y;
  return (ey == 0.0 && ex > 0.0) || ey < 0.0;
}

bool wants(const RenderOptions& o, Channel c) {
  return std::find(o.channels.begin(), o.channels.end(), c) != o.channels.end();
}

}  // namespace

std::string to_string(Channel c) {
  switch (c) {
    case Channel::Red: return "red";
    case Channel::Green: return "green";
    case Channel::Blue: return "blue";
    case Channel::Geometry: return "geometry";
    case Channel::Depth: return "depth";
    case Channel::Curvature: return "curvature";
  }
  return "unknown";
}

std::vector<Channel> parse_channels(const std::string& list) {
  std::vector<Channel> out;
  auto add = [&out](Channel c) {
    if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(c);
  };
  std::stringstream ss(list);
  std::string name;
  while (std::getline(ss, name, ',')) {
    if (name.empty()) continue;
    if (name == "rgb") {
      add(Channel::Red);
      add(Channel::Green);
      add(Channel::Blue);
    } else if (name == "red") add(Channel::Red);
    else if (name == "green") add(Channel::Green);
    else if (name == "blue") add(Channel::Blue);
    else if (name == "geometry") add(Channel::Geometry);
    else if (name == "depth") add(Channel::Depth);
    else if (name == "curvature") add(Channel::Curvature);
    else throw InputError("unknown channel '" + name + "'");
  }
  return out;
}

const Image& RenderedView::channel(Channel c) const {
  auto it = channels.find(c);
  if (it == channels.end()) throw std::out_of_range("view has no " + to_string(c) + " channel");
  return it->second;
}

RenderedView render_view(const TriangleMesh& mesh, const CameraSpec& camera, const RenderOptions& options,
                         const CurvatureField* curvature, int view_id) {
  const bool want_rgb = wants(options, Channel::Red) || wants(options, Channel::Green) || wants(options, Channel::Blue);
  const bool want_geometry = wants(options, Channel::Geometry);
  const bool want_curvature = wants(options, Channel::Curvature);
  if (want_rgb && !mesh.has_colors()) throw InputError("colour channel requested but mesh has no vertex colours");
  if (want_curvature && (!curvature || curvature->values.size() != mesh.vertex_count())) {
    throw InputError("curvature channel requested without a curvature field for this mesh");
  }

  const int w = camera.image_width;
  const int h = camera.image_height;
  RenderedView view;
  view.view_id = view_id;
  view.camera = camera;

  std::vector<double> depth(static_cast<std::size_t>(w) * h, std::numeric_limits<double>::infinity());
  Image red(w, h), green(w, h), blue(w, h), geometry(w, h), curv(w, h);

  std::vector<ScreenVertex> screen(mesh.vertex_count());
  for (std::size_t i = 0; i < mesh.vertex_count(); ++i) {
    const auto ip = project_point(camera, mesh.vertices[i]);
    screen[i] = {ip.u, ip.v, ip.depth};
  }
  const Vec3 toward_camera = -camera.forward();
  const double cmax = options.curvature_max;

  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    auto idx = mesh.triangles[t];
    double area = edge(screen[idx[0]], screen[idx[1]], screen[idx[2]].x, screen[idx[2]].y);
    if (area == 0.0) continue;
    if (area < 0.0) {
      std::swap(idx[1], idx[2]);
      area = -area;
    }
    const ScreenVertex& a = screen[idx[0]];
    const ScreenVertex& b = screen[idx[1]];
    const ScreenVertex& c = screen[idx[2]];

    const int x0 = std::max(0, static_cast<int>(std::ceil(std::min({a.x, b.x, c.x}) - 0.5)));
    const int x1 = std::min(w - 1, static_cast<int>(std::floor(std::max({a.x, b.x, c.x}) - 0.5)));
    const int y0 = std::max(0, static_cast<int>(std::ceil(std::min({a.y, b.y, c.y}) - 0.5)));
    const int y1 = std::min(h - 1, static_cast<int>(std::floor(std::max({a.y, b.y, c.y}) - 0.5)));
    if (x0 > x1 || y0 > y1) continue;

    const bool tl_bc = is_top_left(b, c);
    const bool tl_ca = is_top_left(c, a);
    const bool tl_ab = is_top_left(a, b);
    const double shade = want_geometry ? std::max(0.0, mesh.triangle_normal(t).dot(toward_camera)) : 0.0;

    for (int y = y0; y <= y1; ++y) {
      const double py = y + 0.5;
      for (int x = x0; x <= x1; ++x) {
        const double px = x + 0.5;
        const double w0 = edge(b, c, px, py);
        const double w1 = edge(c, a, px, py);
        const double w2 = edge(a, b, px, py);
        if (w0 < 0.0 || w1 < 0.0 || w2 < 0.0) continue;
        if ((w0 == 0.0 && !tl_bc) || (w1 == 0.0 && !tl_ca) || (w2 == 0.0 && !tl_ab)) continue;

        const double l0 = w0 / area;
        const double l1 = w1 / area;
        const double l2 = w2 / area;
        const double z = l0 * a.z + l1 * b.z + l2 * c.z;
        if (z < -kDepthSlack || z > 1.0 + kDepthSlack) continue;
        const std::size_t pix = static_cast<std::size_t>(y) * w + x;
        if (!(z < depth[pix])) continue;
        depth[pix] = z;

        if (want_geometry) geometry.pixels[pix] = static_cast<float>(shade);
        if (want_rgb) {
          const Vec3 col = l0 * mesh.vertex_colors[idx[0]] + l1 * mesh.vertex_colors[idx[1]] +
                           l2 * mesh.vertex_colors[idx[2]];
          red.pixels[pix] = static_cast<float>(std::clamp(col.x(), 0.0, 1.0));
          green.pixels[pix] = static_cast<float>(std::clamp(col.y(), 0.0, 1.0));
          blue.pixels[pix] = static_cast<float>(std::clamp(col.z(), 0.0, 1.0));
        }
        if (want_curvature) {
          const auto& k = curvature->values;
          const double value = l0 * k[idx[0]] + l1 * k[idx[1]] + l2 * k[idx[2]];
          curv.pixels[pix] = static_cast<float>((std::clamp(value, -cmax, cmax) / cmax + 1.0) * 0.5);
        }
      }
    }
  }

  view.zbuffer = Image(w, h, 1.0f);
  for (std::size_t i = 0; i < depth.size(); ++i) {
    if (std::isfinite(depth[i])) view.zbuffer.pixels[i] = static_cast<float>(std::clamp(depth[i], 0.0, 1.0));
  }
  for (auto c : options.channels) {
    switch (c) {
      case Channel::Red: view.channels[c] = red; break;
      case Channel::Green: view.channels[c] = green; break;
      case Channel::Blue: view.channels[c] = blue; break;
      case Channel::Geometry: view.channels[c] = geometry; break;
      case Channel::Depth: view.channels[c] = view.zbuffer; break;
      case Channel::Curvature: view.channels[c] = curv; break;
    }
  }
  return view;
}

void attach_ground_truth(RenderedView& view, std::span<const Landmark3D> landmarks) {
  // Landmarks sit on the surface, but the nearest pixel centre samples a
  // slightly different surface point; allow a small depth slack.
  constexpr double kVisibilitySlack = 0.02;
  view.gt_landmarks_2d.clear();
  for (const auto& lm : landmarks) {
    const auto ip = project_point(view.camera, lm.position);
    ProjectedLandmark p{lm.id, ip.u, ip.v, false};
    if (ip.inside(view.camera)) {
      const int x = std::min(view.camera.image_width - 1, static_cast<int>(ip.u));
      const int y = std::min(view.camera.image_height - 1, static_cast<int>(ip.v));
      p.visible = ip.depth <= view.zbuffer.at(x, y) + kVisibilitySlack;
    }
    view.gt_landmarks_2d.push_back(p);
  }
}

std::vector<RenderedView> render_views(const TriangleMesh& mesh, std::span<const CameraSpec> cameras,
                                       const RenderOptions& options, const CurvatureField* curvature) {
  std::vector<RenderedView> views(cameras.size());
  const auto n = static_cast<std::ptrdiff_t>(cameras.size());
  // Exceptions may not escape an OpenMP region; validate up front instead.
  if (n > 0) views[0] = render_view(mesh, cameras[0], options, curvature, 0);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 1; i < n; ++i) {
    views[i] = render_view(mesh, cameras[i], options, curvature, static_cast<int>(i));
  }
  return views;
}

namespace serial {
std::vector<RenderedView> render_views(const TriangleMesh& mesh, std::span<const CameraSpec> cameras,
                                       const RenderOptions& options, const CurvatureField* curvature) {
  std::vector<RenderedView> views;
  views.reserve(cameras.size());
  for (std::size_t i = 0; i < cameras.size(); ++i) {
    views.push_back(render_view(mesh, cameras[i], options, curvature, static_cast<int>(i)));
  }
  return views;
}
}  // namespace serial

}  // namespace mvlm
