#pragma once

#include <array>

#include "bsv/mesh.hpp"

namespace bsv {

/// Axis-aligned closed box centered at the origin with `divisions` quads per
/// edge along x, y and z (each split into two triangles).
TriangleMesh make_box(const Vec3& size, const std::array<int, 3>& divisions);

/// Box whose per-axis divisions are chosen so the quads are roughly
/// `target_edge` long.
TriangleMesh make_box_with_edge(const Vec3& size, double target_edge);

/// Closed cube of side `side` with `divisions` quads per edge.
TriangleMesh make_cube(double side, int divisions);

/// Icosahedron subdivided `levels` times, vertices projected onto the sphere.
TriangleMesh make_icosphere(int levels, double radius, const Vec3& center = Vec3::Zero());

/// Open tube along +y from y=0 to y=height (no caps).
TriangleMesh make_open_cylinder(int segments, int rings, double radius, double height);

/// Regular tetrahedron with unit edge length, centroid at the origin.
TriangleMesh make_regular_tetrahedron();

}  // namespace bsv
