#include "mvlm/serialization.hpp"

#include <fstream>

namespace mvlm {

Json vec_to_json(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

Vec3 vec_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 3) throw InputError("expected a 3-element coordinate array");
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

void to_json(Json& j, const CameraSpec& c) {
  j = Json{{"position", vec_to_json(c.position)},
           {"focal_point", vec_to_json(c.focal_point)},
           {"up", vec_to_json(c.up)},
           {"ortho_half_width", c.ortho_half_width},
           {"ortho_half_height", c.ortho_half_height},
           {"near", c.near},
           {"far", c.far},
           {"image_width", c.image_width},
           {"image_height", c.image_height}};
}

void from_json(const Json& j, CameraSpec& c) {
  try {
    c.position = vec_from_json(j.at("position"));
    c.focal_point = vec_from_json(j.at("focal_point"));
    c.up = vec_from_json(j.at("up"));
    c.ortho_half_width = j.at("ortho_half_width").get<double>();
    c.ortho_half_height = j.at("ortho_half_height").get<double>();
    c.near = j.at("near").get<double>();
    c.far = j.at("far").get<double>();
    c.image_width = j.at("image_width").get<int>();
    c.image_height = j.at("image_height").get<int>();
    validate(c);
  } catch (const Json::exception& e) {
    throw InputError(std::string("bad camera record: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw InputError(std::string("bad camera record: ") + e.what());
  }
}

std::vector<Json> read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  std::vector<Json> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(Json::parse(line));
    } catch (const Json::parse_error& e) {
      throw InputError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

void write_jsonl(const std::vector<Json>& records, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  for (const auto& r : records) out << r.dump() << '\n';
}

void write_json(const Json& doc, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << doc.dump(2) << '\n';
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

}  // namespace mvlm
