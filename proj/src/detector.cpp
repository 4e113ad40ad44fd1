#include "mvlm/detector.hpp"

#include "mvlm/serialization.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace mvlm {

std::vector<Detection2D> decode_heatmaps(const HeatmapStack& stack, double threshold, int view_id,
                                         std::span<const int> landmark_ids) {
  if (!landmark_ids.empty() && landmark_ids.size() != stack.planes.size()) {
    throw std::invalid_argument("landmark id list does not match heatmap plane count");
  }
  std::vector<Detection2D> out;
  for (std::size_t i = 0; i < stack.planes.size(); ++i) {
    const Image& plane = stack.planes[i];
    if (plane.pixels.empty()) continue;
    const auto best = std::max_element(plane.pixels.begin(), plane.pixels.end());  // first of equal maxima
    if (!(*best > threshold)) continue;
    const auto idx = static_cast<int>(best - plane.pixels.begin());
    Detection2D d;
    d.landmark_id = landmark_ids.empty() ? static_cast<int>(i) : landmark_ids[i];
    d.u = idx % plane.width + 0.5;
    d.v = idx / plane.width + 0.5;
    d.confidence = std::clamp(static_cast<double>(*best), 0.0, 1.0);
    d.view_id = view_id;
    out.push_back(d);
  }
  return out;
}

void validate(const OracleConfig& c) {
  auto rate = [](double r) { return r >= 0.0 && r <= 1.0; };
  if (!rate(c.outlier_rate) || !rate(c.dropout_rate)) throw std::invalid_argument("oracle rates must lie in [0,1]");
  if (!(c.noise_sigma >= 0.0) || !(c.outlier_spread >= 0.0)) {
    throw std::invalid_argument("oracle noise and spread must be non-negative");
  }
}

std::vector<Detection2D> oracle_detect(const CameraSpec& camera, int view_id, std::span<const Landmark3D> landmarks,
                                       const OracleConfig& config) {
  validate(config);
  std::vector<Detection2D> out;
  for (const auto& lm : landmarks) {
    std::seed_seq seq{static_cast<std::uint32_t>(config.rng_seed), static_cast<std::uint32_t>(config.rng_seed >> 32),
                      static_cast<std::uint32_t>(view_id), static_cast<std::uint32_t>(lm.id)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    if (uniform(rng) < config.dropout_rate) continue;
    const auto ip = project_point(camera, lm.position);
    double u = ip.u;
    double v = ip.v;
    if (uniform(rng) < config.outlier_rate) {
      const double r = config.outlier_spread * std::sqrt(uniform(rng));
      const double phi = 2.0 * std::numbers::pi * uniform(rng);
      u += r * std::cos(phi);
      v += r * std::sin(phi);
    } else {
      u += config.noise_sigma * gauss(rng);
      v += config.noise_sigma * gauss(rng);
    }
    Detection2D d;
    d.landmark_id = lm.id;
    d.u = std::clamp(u, 0.0, static_cast<double>(camera.image_width));
    d.v = std::clamp(v, 0.0, static_cast<double>(camera.image_height));
    d.confidence = 1.0;
    d.view_id = view_id;
    out.push_back(d);
  }
  return out;
}

std::vector<Detection2D> oracle_detect(const RenderedView& view, std::span<const Landmark3D> landmarks,
                                       const OracleConfig& config) {
  return oracle_detect(view.camera, view.view_id, landmarks, config);
}

void write_detections(std::span<const Detection2D> detections, const std::filesystem::path& path) {
  std::vector<Json> lines;
  lines.reserve(detections.size());
  for (const auto& d : detections) {
    lines.push_back(Json{{"view_id", d.view_id}, {"landmark_id", d.landmark_id}, {"u", d.u}, {"v", d.v},
                         {"confidence", d.confidence}});
  }
  write_jsonl(lines, path);
}

std::vector<Detection2D> read_detections(const std::filesystem::path& path) {
  std::vector<Detection2D> out;
  for (const auto& j : read_jsonl(path)) {
    try {
      Detection2D d;
      d.view_id = j.at("view_id").get<int>();
      d.landmark_id = j.at("landmark_id").get<int>();
      d.u = j.at("u").get<double>();
      d.v = j.at("v").get<double>();
      d.confidence = j.value("confidence", 1.0);
      out.push_back(d);
    } catch (const Json::exception& e) {
      throw InputError("malformed detection record in '" + path.string() + "': " + e.what());
    }
  }
  return out;
}

}  // namespace mvlm
