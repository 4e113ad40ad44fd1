#include "mvlm/landmarks.hpp"

#include "mvlm/serialization.hpp"

#include <set>

namespace mvlm {

const Landmark3D* LandmarkSet::find(int id) const {
  for (const auto& e : entries) {
    if (e.id == id) return &e;
  }
  return nullptr;
}

void validate(const LandmarkSet& set) {
  std::set<int> ids;
  for (const auto& e : set.entries) {
    if (!ids.insert(e.id).second) throw InputError("duplicate landmark id " + std::to_string(e.id));
    if (!e.position.allFinite()) throw InputError("landmark " + std::to_string(e.id) + " has non-finite coordinates");
  }
}

LandmarkSet load_landmarks(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw InputError("landmark file '" + path.string() + "' does not exist");
  const Json doc = read_json(path);
  LandmarkSet set;
  try {
    set.schema_name = doc.value("schema_name", std::string{});
    for (const auto& e : doc.at("landmarks")) {
      set.entries.push_back(Landmark3D{e.at("id").get<int>(), e.value("name", std::string{}), vec_from_json(e.at("xyz"))});
    }
  } catch (const Json::exception& e) {
    throw InputError("malformed landmark file '" + path.string() + "': " + e.what());
  }
  validate(set);
  return set;
}

void save_landmarks(const LandmarkSet& set, const std::filesystem::path& path) {
  Json doc{{"schema_name", set.schema_name}, {"landmarks", Json::array()}};
  for (const auto& e : set.entries) {
    doc["landmarks"].push_back(Json{{"id", e.id}, {"name", e.name}, {"xyz", vec_to_json(e.position)}});
  }
  write_json(doc, path);
}

}  // namespace mvlm
