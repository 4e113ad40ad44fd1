#include "mvlm/camera.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace mvlm {

CameraSpec CameraSpec::look_at(const Vec3& position, const Vec3& focal_point, const Vec3& up_hint,
                               double half_width, double half_height, double near, double far, int width,
                               int height) {
  CameraSpec c;
  c.position = position;
  c.focal_point = focal_point;
  const Vec3 f = (focal_point - position).normalized();
  c.up = (up_hint - up_hint.dot(f) * f).normalized();
  c.ortho_half_width = half_width;
  c.ortho_half_height = half_height;
  c.near = near;
  c.far = far;
  c.image_width = width;
  c.image_height = height;
  validate(c);
  return c;
}

void validate(const CameraSpec& c) {
  const Vec3 view = c.focal_point - c.position;
  if (!(view.norm() > 0.0)) throw std::invalid_argument("camera view direction is zero");
  if (!(c.up.norm() > 0.0) || view.normalized().cross(c.up.normalized()).norm() < 1e-9) {
    throw std::invalid_argument("camera up vector is parallel to the view direction");
  }
  if (!(c.near < c.far)) throw std::invalid_argument("camera near plane must be closer than far plane");
  if (!(c.ortho_half_width > 0.0) || !(c.ortho_half_height > 0.0)) {
    throw std::invalid_argument("camera orthographic extents must be positive");
  }
  if (c.image_width <= 0 || c.image_height <= 0) throw std::invalid_argument("camera image size must be positive");
}

ImagePoint project_point(const CameraSpec& c, const Vec3& p) {
  const Vec3 f = c.forward();
  const Vec3 r = f.cross(c.up).normalized();
  const Vec3 d = p - c.position;
  const double x = d.dot(r);
  const double y = d.dot(c.up);
  const double z = d.dot(f);
  ImagePoint ip;
  ip.u = (x / c.ortho_half_width + 1.0) * 0.5 * c.image_width;
  ip.v = (1.0 - y / c.ortho_half_height) * 0.5 * c.image_height;
  ip.depth = (z - c.near) / (c.far - c.near);
  return ip;
}

Ray unproject(const CameraSpec& c, double u, double v) {
  const Vec3 f = c.forward();
  const Vec3 r = f.cross(c.up).normalized();
  const double x = (2.0 * u / c.image_width - 1.0) * c.ortho_half_width;
  const double y = (1.0 - 2.0 * v / c.image_height) * c.ortho_half_height;
  return Ray{c.position + x * r + y * c.up + c.near * f, f};
}

std::vector<CameraSpec> sample_cameras(const TriangleMesh& mesh, const ViewSamplingConfig& config) {
  if (mesh.vertices.empty()) throw std::invalid_argument("cannot place cameras around an empty mesh");
  if (config.view_count < 1) throw std::invalid_argument("view count must be at least 1");
  if (!(config.cap_half_angle_deg >= 0.0 && config.cap_half_angle_deg <= 180.0)) {
    throw std::invalid_argument("cap half angle must lie in [0, 180] degrees");
  }
  if (!(config.frontal_axis.norm() > 0.0)) throw std::invalid_argument("frontal axis must be nonzero");

  const BoundingBox box = mesh.bounds();
  const Vec3 center = box.center();
  double radius = 0.0;
  for (const auto& v : mesh.vertices) radius = std::max(radius, (v - center).norm());
  if (!(radius > 0.0) || box.extent().maxCoeff() <= 0.0) {
    throw std::invalid_argument("mesh bounding box has zero extent");
  }

  const Vec3 axis = config.frontal_axis.normalized();
  const Vec3 helper = std::abs(axis.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  const Vec3 e1 = axis.cross(helper).normalized();
  const Vec3 e2 = axis.cross(e1);
  const double cos_cap = std::cos(config.cap_half_angle_deg * std::numbers::pi / 180.0);

  std::array<Vec3, 8> corners;
  for (int i = 0; i < 8; ++i) {
    corners[i] = Vec3(i & 1 ? box.max.x() : box.min.x(), i & 2 ? box.max.y() : box.min.y(),
                      i & 4 ? box.max.z() : box.min.z());
  }

  std::mt19937_64 rng(config.rng_seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::vector<CameraSpec> cameras;
  cameras.reserve(static_cast<std::size_t>(config.view_count));
  for (int i = 0; i < config.view_count; ++i) {
    // Uniform area on the cap: cos(theta) uniform in [cos_cap, 1].
    const double cos_t = 1.0 - uniform(rng) * (1.0 - cos_cap);
    const double phi = 2.0 * std::numbers::pi * uniform(rng);
    const double sin_t = std::sqrt(std::max(0.0, 1.0 - cos_t * cos_t));
    const Vec3 dir = cos_t * axis + sin_t * (std::cos(phi) * e1 + std::sin(phi) * e2);

    const Vec3 position = center + 2.0 * radius * dir;
    const Vec3 forward = -dir;
    const Vec3 up_hint = std::abs(forward.dot(Vec3::UnitY())) > 1.0 - 1e-9 ? Vec3::UnitZ() : Vec3::UnitY();

    double near = std::numeric_limits<double>::infinity();
    double far = -near;
    for (const auto& c : corners) {
      const double z = (c - position).dot(forward);
      near = std::min(near, z);
      far = std::max(far, z);
    }
    if (far - near < 1e-9 * radius) {
      near -= 1e-6 * radius;
      far += 1e-6 * radius;
    }
    const double half = 1.05 * radius;
    cameras.push_back(CameraSpec::look_at(position, center, up_hint, half, half, near, far));
  }
  return cameras;
}

}  // namespace mvlm
