#pragma once

#include "mvlm/types.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace mvlm {

struct Landmark3D {
  int id = 0;
  std::string name;
  Vec3 position = Vec3::Zero();
};

/// Named 3D landmarks of one surface, e.g. a 73-point facial scheme.
struct LandmarkSet {
  std::string schema_name;
  std::vector<Landmark3D> entries;

  const Landmark3D* find(int id) const;
};

// Unique ids and finite coordinates; throws InputError otherwise.
void validate(const LandmarkSet& set);

// JSON: {"schema_name": ..., "landmarks": [{"id", "name", "xyz": [x, y, z]}]}
LandmarkSet load_landmarks(const std::filesystem::path& path);
void save_landmarks(const LandmarkSet& set, const std::filesystem::path& path);

}  // namespace mvlm
