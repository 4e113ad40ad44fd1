#pragma once

#include "mvlm/mesh.hpp"

namespace mvlm::shapes {

// Icosahedron refined by edge-midpoint subdivision, vertices pushed onto the
// sphere. Vertex count 10*4^s + 2, triangle count 20*4^s. The 12 icosahedron
// corners keep ids 0..11 at every level. Triangles wind outward.
TriangleMesh icosphere(int subdivisions, double radius, const Vec3& center = Vec3::Zero());

// Regular nx-by-ny vertex grid in the z = 0 plane, normals along +z.
TriangleMesh grid(int nx, int ny, double spacing);

// Open cylinder around the z axis (no caps), outward normals.
TriangleMesh cylinder(double radius, double height, int segments, int rings);

}  // namespace mvlm::shapes
