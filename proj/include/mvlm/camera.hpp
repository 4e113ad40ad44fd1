#pragma once

#include "mvlm/mesh.hpp"

#include <cstdint>
#include <vector>

namespace mvlm {

inline constexpr int kDefaultImageSize = 256;
// Near and far hug the mesh, so points on the clip planes may land a rounding
// error outside [0, 1].
inline constexpr double kDepthSlack = 1e-9;

/// Orthographic camera. Image u grows along `right()`, v grows along -`up`,
/// pixel centres sit at integer + 0.5, so the focal point lands on
/// (width/2, height/2). Depth is normalised linearly over [near, far], both
/// measured from `position` along the view axis.
struct CameraSpec {
  Vec3 position = Vec3(0, 0, 1);
  Vec3 focal_point = Vec3::Zero();
  Vec3 up = Vec3(0, 1, 0);  // unit, orthogonal to the view axis
  double ortho_half_width = 1.0;
  double ortho_half_height = 1.0;
  double near = 0.0;
  double far = 2.0;
  int image_width = kDefaultImageSize;
  int image_height = kDefaultImageSize;

  // Builds a camera whose up vector is `up_hint` made orthogonal to the view axis.
  static CameraSpec look_at(const Vec3& position, const Vec3& focal_point, const Vec3& up_hint,
                            double half_width, double half_height, double near, double far,
                            int width = kDefaultImageSize, int height = kDefaultImageSize);

  Vec3 forward() const { return (focal_point - position).normalized(); }
  Vec3 right() const { return forward().cross(up).normalized(); }
  // Millimetres covered by one pixel horizontally.
  double mm_per_pixel() const { return 2.0 * ortho_half_width / image_width; }
};

// Throws std::invalid_argument on a violated camera invariant.
void validate(const CameraSpec& camera);

struct ImagePoint {
  double u = 0.0;
  double v = 0.0;
  double depth = 0.0;  // normalised; outside [0,1] beyond the clip planes

  bool inside(const CameraSpec& c) const {
    return u >= 0.0 && u < c.image_width && v >= 0.0 && v < c.image_height && depth >= -kDepthSlack && depth <= 1.0 + kDepthSlack;
  }
};

ImagePoint project_point(const CameraSpec& camera, const Vec3& p);

struct Ray {
  Vec3 origin;
  Vec3 direction;  // unit
};

// Inverse of project_point: the ray of all points imaging to (u, v), starting
// on the near plane and running along the view axis.
Ray unproject(const CameraSpec& camera, double u, double v);

struct ViewSamplingConfig {
  int view_count = 100;
  Vec3 frontal_axis = Vec3(0, 0, 1);
  double cap_half_angle_deg = 60.0;
  std::uint64_t rng_seed = 0;
};

// Positions uniform on the spherical cap around the frontal axis, at twice the
// bounding-sphere radius from the bounding-box centre, which is also the focal
// point. Cameras are drawn sequentially, so a smaller view count yields a
// prefix of a larger one with the same seed.
std::vector<CameraSpec> sample_cameras(const TriangleMesh& mesh, const ViewSamplingConfig& config);

}  // namespace mvlm
