#pragma once

#include "mvlm/camera.hpp"
#include "mvlm/curvature.hpp"
#include "mvlm/image.hpp"
#include "mvlm/landmarks.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mvlm {

enum class Channel { Red, Green, Blue, Geometry, Depth, Curvature };

std::string to_string(Channel c);
// Parses a comma list such as "rgb,geometry,depth,curvature"; "rgb" expands
// to the three colour planes. Throws InputError on unknown names.
std::vector<Channel> parse_channels(const std::string& list);

struct RenderOptions {
  std::vector<Channel> channels = {Channel::Geometry, Channel::Depth};
  double curvature_max = 0.5;  // 1/mm mapped to 1.0; -curvature_max maps to 0.0
};

struct ProjectedLandmark {
  int landmark_id = 0;
  double u = 0.0;
  double v = 0.0;
  bool visible = false;
};

struct RenderedView {
  int view_id = 0;
  CameraSpec camera;
  std::map<Channel, Image> channels;
  Image zbuffer;  // normalised depth, 1 for background; always present
  std::vector<ProjectedLandmark> gt_landmarks_2d;

  const Image& channel(Channel c) const;
};

// Single-threaded z-buffered rasterisation of one view. Requested colour or
// curvature channels need vertex colours or `curvature` respectively.
RenderedView render_view(const TriangleMesh& mesh, const CameraSpec& camera, const RenderOptions& options,
                         const CurvatureField* curvature = nullptr, int view_id = 0);

// Projects ground-truth landmarks into the view, flagging those not hidden by
// the z-buffer. Occluded landmarks are kept.
void attach_ground_truth(RenderedView& view, std::span<const Landmark3D> landmarks);

// One view per camera, view ids 0..n-1. OpenMP over views; identical output
// to the serial reference.
std::vector<RenderedView> render_views(const TriangleMesh& mesh, std::span<const CameraSpec> cameras,
                                       const RenderOptions& options, const CurvatureField* curvature = nullptr);
namespace serial {
std::vector<RenderedView> render_views(const TriangleMesh& mesh, std::span<const CameraSpec> cameras,
                                       const RenderOptions& options, const CurvatureField* curvature = nullptr);
}

}  // namespace mvlm
