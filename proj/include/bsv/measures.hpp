#pragma once

#include "bsv/mesh.hpp"

namespace bsv {

/// Enclosed volume in m^3 from the divergence theorem,
/// V = 1/6 sum_f det[v0 v1 v2]. Positive for outward-oriented meshes.
/// Throws GeometryError (with the boundary-edge count) when the mesh is not
/// watertight.
double signed_volume(const TriangleMesh& mesh);

/// Same sum without the watertightness check.
double signed_volume_unchecked(const TriangleMesh& mesh);

/// Sum of triangle areas in m^2.
double surface_area(const TriangleMesh& mesh);

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c);

}  // namespace bsv
