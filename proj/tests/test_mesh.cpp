#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "test_support.hpp"

#include <fstream>

using namespace mvlm;
using namespace mvlm::testing;

namespace {

void write_text(const std::filesystem::path& p, const std::string& s) {
  std::ofstream(p) << s;
}

}  // namespace

TEST_CASE("OBJ with four vertices and two triangles") {
  const auto dir = temp_dir("obj");
  write_text(dir / "quad.obj",
             "# quad\nv 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nvn 0 0 1\nf 1 2 3\nf 1/1/1 3/3/1 4/4/1\n");
  const auto mesh = load_mesh(dir / "quad.obj");
  CHECK(mesh.vertex_count() == 4);
  CHECK(mesh.triangle_count() == 2);
  CHECK(mesh.triangles[1] == Triangle{0, 2, 3});
  CHECK_FALSE(mesh.has_colors());
}

TEST_CASE("ascii PLY with uchar colours normalises by 255") {
  const auto dir = temp_dir("ply_ascii");
  write_text(dir / "tri.ply",
             "ply\nformat ascii 1.0\ncomment red triangle\nelement vertex 3\n"
             "property float x\nproperty float y\nproperty float z\n"
             "property uchar red\nproperty uchar green\nproperty uchar blue\n"
             "element face 1\nproperty list uchar int vertex_indices\nend_header\n"
             "0 0 0 255 0 0\n1 0 0 255 0 0\n0 1 0 255 0 0\n3 0 1 2\n");
  const auto mesh = load_mesh(dir / "tri.ply");
  REQUIRE(mesh.has_colors());
  for (const auto& c : mesh.vertex_colors) CHECK(c == Vec3(1, 0, 0));
}

TEST_CASE("binary PLY round trip keeps geometry and colours") {
  const auto dir = temp_dir("ply_bin");
  auto mesh = shapes::icosphere(2, 30.0);
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> byte(0, 255);
  for (std::size_t i = 0; i < mesh.vertex_count(); ++i) {
    mesh.vertex_colors.emplace_back(byte(rng) / 255.0, byte(rng) / 255.0, byte(rng) / 255.0);
  }
  save_ply(mesh, dir / "a.ply", true);
  save_ply(mesh, dir / "b.ply", false);
  for (const char* name : {"a.ply", "b.ply"}) {
    const auto back = load_mesh(dir / name);
    REQUIRE(back.vertex_count() == mesh.vertex_count());
    CHECK(back.triangles == mesh.triangles);
    for (std::size_t i = 0; i < mesh.vertex_count(); ++i) {
      CHECK((back.vertices[i] - mesh.vertices[i]).norm() < 1e-12);
      CHECK((back.vertex_colors[i] - mesh.vertex_colors[i]).norm() < 1e-12);
    }
  }
}

TEST_CASE("icosphere counts follow the subdivision formula") {
  // V = 10 * 4^s + 2, F = 20 * 4^s
  for (int s = 0; s <= 4; ++s) {
    const auto mesh = shapes::icosphere(s, 1.0);
    const std::size_t f = 20u << (2 * s);
    CHECK(mesh.triangle_count() == f);
    CHECK(mesh.vertex_count() == f / 2 + 2);
  }
  const auto dir = temp_dir("ico");
  save_obj(shapes::icosphere(3, 1000.0), dir / "ico.obj");
  const auto mesh = load_mesh(dir / "ico.obj");
  CHECK(mesh.vertex_count() == 642);
  CHECK(mesh.triangle_count() == 1280);
}

TEST_CASE("icosphere triangles wind outward") {
  const auto mesh = shapes::icosphere(2, 10.0);
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    const auto& tri = mesh.triangles[t];
    const Vec3 centroid = (mesh.vertices[tri[0]] + mesh.vertices[tri[1]] + mesh.vertices[tri[2]]) / 3.0;
    CHECK(mesh.triangle_normal(t).dot(centroid) > 0.0);
  }
}

TEST_CASE("OBJ save/load is idempotent") {
  const auto dir = temp_dir("obj_rt");
  std::mt19937_64 rng(11);
  const auto mesh = random_mesh(rng);
  save_obj(mesh, dir / "m.obj");
  const auto once = load_mesh(dir / "m.obj");
  save_obj(once, dir / "m2.obj");
  const auto twice = load_mesh(dir / "m2.obj");
  CHECK(once.triangles == mesh.triangles);
  CHECK(twice.triangles == mesh.triangles);
  for (std::size_t i = 0; i < mesh.vertex_count(); ++i) {
    CHECK(once.vertices[i] == twice.vertices[i]);
    CHECK((once.vertices[i] - mesh.vertices[i]).norm() < 1e-12);
  }
}

TEST_CASE("load_mesh errors") {
  const auto dir = temp_dir("errors");
  CHECK_THROWS_AS(load_mesh(dir / "missing.obj"), InputError);

  write_text(dir / "empty.obj", "v 0 0 0\nv 1 0 0\nv 0 1 0\n");
  CHECK_THROWS_AS(load_mesh(dir / "empty.obj"), InputError);

  write_text(dir / "range.obj", "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 4\n");
  CHECK_THROWS_AS(load_mesh(dir / "range.obj"), InputError);

  write_text(dir / "repeat.obj", "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 2\n");
  CHECK_THROWS_AS(load_mesh(dir / "repeat.obj"), InputError);

  write_text(dir / "quad.obj", "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n");
  CHECK_THROWS_AS(load_mesh(dir / "quad.obj"), InputError);

  write_text(dir / "bad.obj", "v 0 zero 0\n");
  CHECK_THROWS_AS(load_mesh(dir / "bad.obj"), InputError);

  write_text(dir / "trunc.ply", "ply\nformat binary_little_endian 1.0\nelement vertex 3\nproperty float x\n"
                                "property float y\nproperty float z\nend_header\n\x01\x02");
  CHECK_THROWS_AS(load_mesh(dir / "trunc.ply"), InputError);

  write_text(dir / "mesh.stl", "solid x\n");
  CHECK_THROWS_AS(load_mesh(dir / "mesh.stl"), InputError);
}

TEST_CASE("grow_neighborhood: radius below the shortest edge keeps only the seed") {
  const auto mesh = shapes::grid(5, 5, 1.0);
  CHECK(grow_neighborhood(mesh, 12, 0.5) == std::vector<std::uint32_t>{12});
}

TEST_CASE("grow_neighborhood matches a brute-force BFS on a 1 mm grid") {
  const auto mesh = shapes::grid(11, 11, 1.0);
  for (std::uint32_t seed : {0u, 5u, 60u, 120u}) {
    const auto got = grow_neighborhood(mesh, seed, 2.5);
    const auto want = bfs_oracle(mesh, seed, 2.5);
    CHECK(std::set<std::uint32_t>(got.begin(), got.end()) == want);
  }
  // Interior vertex: lattice points within 2.5 of the centre.
  CHECK(grow_neighborhood(mesh, 60, 2.5).size() == 21);
}

TEST_CASE("grow_neighborhood: huge radius returns the connected component") {
  auto mesh = shapes::grid(4, 4, 1.0);
  const auto offset = static_cast<std::uint32_t>(mesh.vertex_count());
  // A second, disconnected triangle.
  mesh.vertices.emplace_back(0.5, 0.5, 0.1);
  mesh.vertices.emplace_back(0.6, 0.5, 0.1);
  mesh.vertices.emplace_back(0.5, 0.6, 0.1);
  mesh.triangles.push_back({offset, offset + 1, offset + 2});
  CHECK(grow_neighborhood(mesh, 0, 1e6).size() == 16);
  CHECK(grow_neighborhood(mesh, offset, 1e6).size() == 3);
}

TEST_CASE("grow_neighborhood is monotone in radius and agrees with the oracle on random meshes") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    const auto mesh = random_mesh(rng);
    std::uniform_int_distribution<std::uint32_t> vid(0, static_cast<std::uint32_t>(mesh.vertex_count() - 1));
    const auto seed = vid(rng);
    std::vector<std::uint32_t> prev;
    for (double r : {5.0, 10.0, 20.0, 40.0, 80.0}) {
      const auto cur = grow_neighborhood(mesh, seed, r);
      CHECK(std::includes(cur.begin(), cur.end(), prev.begin(), prev.end()));
      CHECK(std::set<std::uint32_t>(cur.begin(), cur.end()) == bfs_oracle(mesh, seed, r));
      prev = cur;
    }
  }
}

TEST_CASE("grow_neighborhood rejects a non-positive radius") {
  const auto mesh = shapes::grid(3, 3, 1.0);
  CHECK_THROWS(grow_neighborhood(mesh, 0, 0.0));
}
