#pragma once

// JSON mappings for records that leave the process: camera metadata,
// detections, consensus results and evaluation reports.

#include "json.hpp"

#include "mvlm/camera.hpp"
#include "mvlm/types.hpp"

#include <filesystem>
#include <vector>

namespace mvlm {

using Json = nlohmann::json;

void to_json(Json& j, const CameraSpec& c);
void from_json(const Json& j, CameraSpec& c);

Json vec_to_json(const Vec3& v);
Vec3 vec_from_json(const Json& j);

// One JSON document per line; blank lines skipped.
std::vector<Json> read_jsonl(const std::filesystem::path& path);
void write_jsonl(const std::vector<Json>& records, const std::filesystem::path& path);
void write_json(const Json& doc, const std::filesystem::path& path);
Json read_json(const std::filesystem::path& path);

}  // namespace mvlm
