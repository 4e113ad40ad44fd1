#include "mvlm/mesh.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

namespace mvlm {
namespace {

static_assert(std::endian::native == std::endian::little, "binary PLY I/O assumes a little-endian host");

std::string lower_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return ext;
}

[[noreturn]] void malformed(const std::filesystem::path& path, const std::string& what) {
  throw InputError("malformed mesh file '" + path.string() + "': " + what);
}

// Parses "12", "12/3", "12/3/4" or "12//4"; negative indices are relative.
std::uint32_t parse_obj_index(const std::string& token, std::size_t vertex_count,
                              const std::filesystem::path& path) {
  const std::string head = token.substr(0, token.find('/'));
  long long idx = 0;
  try {
    std::size_t used = 0;
    idx = std::stoll(head, &used);
    if (used != head.size()) malformed(path, "bad face index '" + token + "'");
  } catch (const std::logic_error&) {
    malformed(path, "bad face index '" + token + "'");
  }
  if (idx < 0) idx += static_cast<long long>(vertex_count) + 1;
  if (idx < 1 || idx > static_cast<long long>(vertex_count)) {
    malformed(path, "face index " + token + " out of range");
  }
  return static_cast<std::uint32_t>(idx - 1);
}

TriangleMesh load_obj(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open mesh file '" + path.string() + "'");
  TriangleMesh mesh;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      Vec3 p;
      if (!(ls >> p.x() >> p.y() >> p.z())) malformed(path, "bad vertex on line " + std::to_string(line_no));
      mesh.vertices.push_back(p);
    } else if (tag == "f") {
      std::vector<std::string> tokens;
      std::string tok;
      while (ls >> tok) tokens.push_back(tok);
      if (tokens.size() != 3) {
        malformed(path, "only triangular faces are supported (line " + std::to_string(line_no) + ")");
      }
      Triangle tri;
      for (int k = 0; k < 3; ++k) tri[k] = parse_obj_index(tokens[k], mesh.vertices.size(), path);
      mesh.triangles.push_back(tri);
    }
  }
  return mesh;
}

enum class PlyType { Int8, UInt8, Int16, UInt16, Int32, UInt32, Float32, Float64 };

PlyType parse_ply_type(const std::string& name, const std::filesystem::path& path) {
  if (name == "char" || name == "int8") return PlyType::Int8;
  if (name == "uchar" || name == "uint8") return PlyType::UInt8;
  if (name == "short" || name == "int16") return PlyType::Int16;
  if (name == "ushort" || name == "uint16") return PlyType::UInt16;
  if (name == "int" || name == "int32") return PlyType::Int32;
  if (name == "uint" || name == "uint32") return PlyType::UInt32;
  if (name == "float" || name == "float32") return PlyType::Float32;
  if (name == "double" || name == "float64") return PlyType::Float64;
  malformed(path, "unknown property type '" + name + "'");
}

struct PlyProperty {
  std::string name;
  PlyType type = PlyType::Float32;
  bool is_list = false;
  PlyType count_type = PlyType::UInt8;
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> properties;
};

class PlyReader {
 public:
  PlyReader(std::istream& in, bool binary, const std::filesystem::path& path)
      : in_(in), binary_(binary), path_(path) {}

  double read(PlyType type) {
    if (!binary_) {
      double v = 0;
      if (!(in_ >> v)) malformed(path_, "unexpected end of ascii data");
      return v;
    }
    switch (type) {
      case PlyType::Int8: return raw<std::int8_t>();
      case PlyType::UInt8: return raw<std::uint8_t>();
      case PlyType::Int16: return raw<std::int16_t>();
      case PlyType::UInt16: return raw<std::uint16_t>();
      case PlyType::Int32: return raw<std::int32_t>();
      case PlyType::UInt32: return raw<std::uint32_t>();
      case PlyType::Float32: return raw<float>();
      case PlyType::Float64: return raw<double>();
    }
    return 0;
  }

 private:
  template <typename T>
  double raw() {
    T v;
    if (!in_.read(reinterpret_cast<char*>(&v), sizeof(T))) malformed(path_, "unexpected end of binary data");
    return static_cast<double>(v);
  }

  std::istream& in_;
  bool binary_;
  const std::filesystem::path& path_;
};

TriangleMesh load_ply(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open mesh file '" + path.string() + "'");

  std::string line;
  std::getline(in, line);
  if (line.rfind("ply", 0) != 0) malformed(path, "missing 'ply' magic");

  bool binary = false;
  std::vector<PlyElement> elements;
  bool header_done = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string kw;
    ls >> kw;
    if (kw == "format") {
      std::string fmt;
      ls >> fmt;
      if (fmt == "ascii") binary = false;
      else if (fmt == "binary_little_endian") binary = true;
      else malformed(path, "unsupported PLY format '" + fmt + "'");
    } else if (kw == "element") {
      PlyElement e;
      if (!(ls >> e.name >> e.count)) malformed(path, "bad element line");
      elements.push_back(e);
    } else if (kw == "property") {
      if (elements.empty()) malformed(path, "property before element");
      PlyProperty p;
      std::string type;
      ls >> type;
      if (type == "list") {
        std::string count_type, item_type;
        ls >> count_type >> item_type >> p.name;
        p.is_list = true;
        p.count_type = parse_ply_type(count_type, path);
        p.type = parse_ply_type(item_type, path);
      } else {
        p.type = parse_ply_type(type, path);
        ls >> p.name;
      }
      elements.back().properties.push_back(p);
    } else if (kw == "end_header") {
      header_done = true;
      break;
    }
  }
  if (!header_done) malformed(path, "missing end_header");

  TriangleMesh mesh;
  PlyReader reader(in, binary, path);
  for (const auto& e : elements) {
    if (e.name == "vertex") {
      mesh.vertices.resize(e.count);
      bool has_color = false;
      for (const auto& p : e.properties) has_color |= (p.name == "red");
      if (has_color) mesh.vertex_colors.assign(e.count, Vec3::Zero());
      for (std::size_t i = 0; i < e.count; ++i) {
        for (const auto& p : e.properties) {
          if (p.is_list) {
            const auto n = static_cast<std::size_t>(reader.read(p.count_type));
            for (std::size_t k = 0; k < n; ++k) reader.read(p.type);
            continue;
          }
          const double v = reader.read(p.type);
          if (p.name == "x") mesh.vertices[i].x() = v;
          else if (p.name == "y") mesh.vertices[i].y() = v;
          else if (p.name == "z") mesh.vertices[i].z() = v;
          else if (p.name == "red") mesh.vertex_colors[i].x() = v / 255.0;
          else if (p.name == "green") mesh.vertex_colors[i].y() = v / 255.0;
          else if (p.name == "blue") mesh.vertex_colors[i].z() = v / 255.0;
        }
      }
    } else if (e.name == "face") {
      mesh.triangles.reserve(e.count);
      for (std::size_t i = 0; i < e.count; ++i) {
        for (const auto& p : e.properties) {
          if (!p.is_list) {
            reader.read(p.type);
            continue;
          }
          const auto n = static_cast<std::size_t>(reader.read(p.count_type));
          std::vector<double> idx(n);
          for (auto& x : idx) x = reader.read(p.type);
          if (p.name != "vertex_indices" && p.name != "vertex_index") continue;
          if (n != 3) malformed(path, "only triangular faces are supported");
          Triangle tri;
          for (int k = 0; k < 3; ++k) {
            if (idx[k] < 0) malformed(path, "negative face index");
            tri[k] = static_cast<std::uint32_t>(idx[k]);
          }
          mesh.triangles.push_back(tri);
        }
      }
    } else {
      for (std::size_t i = 0; i < e.count; ++i) {
        for (const auto& p : e.properties) {
          const std::size_t n = p.is_list ? static_cast<std::size_t>(reader.read(p.count_type)) : 1;
          for (std::size_t k = 0; k < n; ++k) reader.read(p.type);
        }
      }
    }
  }
  return mesh;
}

}  // namespace

TriangleMesh load_mesh(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw InputError("mesh file '" + path.string() + "' does not exist");
  const std::string ext = lower_extension(path);
  TriangleMesh mesh;
  if (ext == ".obj") mesh = load_obj(path);
  else if (ext == ".ply") mesh = load_ply(path);
  else throw InputError("unsupported mesh format '" + ext + "' (expected .obj or .ply)");
  validate(mesh);
  return mesh;
}

void save_obj(const TriangleMesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out.precision(17);
  for (const auto& v : mesh.vertices) out << "v " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  for (const auto& t : mesh.triangles) out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
}

void save_ply(const TriangleMesh& mesh, const std::filesystem::path& path, bool binary) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  const bool colors = mesh.has_colors();
  out << "ply\nformat " << (binary ? "binary_little_endian" : "ascii") << " 1.0\n"
      << "element vertex " << mesh.vertex_count() << "\n"
      << "property double x\nproperty double y\nproperty double z\n";
  if (colors) out << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  out << "element face " << mesh.triangle_count() << "\n"
      << "property list uchar int vertex_indices\nend_header\n";

  auto to_uchar = [](double c) {
    return static_cast<std::uint8_t>(std::lround(std::clamp(c, 0.0, 1.0) * 255.0));
  };
  if (binary) {
    for (std::size_t i = 0; i < mesh.vertex_count(); ++i) {
      out.write(reinterpret_cast<const char*>(mesh.vertices[i].data()), 3 * sizeof(double));
      if (colors) {
        const std::uint8_t rgb[3] = {to_uchar(mesh.vertex_colors[i].x()), to_uchar(mesh.vertex_colors[i].y()),
                                     to_uchar(mesh.vertex_colors[i].z())};
        out.write(reinterpret_cast<const char*>(rgb), 3);
      }
    }
    for (const auto& t : mesh.triangles) {
      const std::uint8_t n = 3;
      out.write(reinterpret_cast<const char*>(&n), 1);
      const std::int32_t idx[3] = {static_cast<std::int32_t>(t[0]), static_cast<std::int32_t>(t[1]),
                                   static_cast<std::int32_t>(t[2])};
      out.write(reinterpret_cast<const char*>(idx), sizeof(idx));
    }
  } else {
    out.precision(17);
    for (std::size_t i = 0; i < mesh.vertex_count(); ++i) {
      const auto& v = mesh.vertices[i];
      out << v.x() << ' ' << v.y() << ' ' << v.z();
      if (colors) {
        const auto& c = mesh.vertex_colors[i];
        out << ' ' << int(to_uchar(c.x())) << ' ' << int(to_uchar(c.y())) << ' ' << int(to_uchar(c.z()));
      }
      out << '\n';
    }
    for (const auto& t : mesh.triangles) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  }
}

}  // namespace mvlm
