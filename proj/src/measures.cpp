#include "bsv/measures.hpp"

#include <string>

#include "bsv/error.hpp"
#include "bsv/topology.hpp"

namespace bsv {

double signed_volume_unchecked(const TriangleMesh& mesh) {
  // Accumulate relative to the bounding-box center to keep the determinant
  // terms small for meshes far from the origin.
  const Vec3 origin = bounding_box(mesh.vertices()).center();
  double six_v = 0.0;
  for (const auto& f : mesh.faces()) {
    const Vec3 a = mesh.vertex(f[0]) - origin;
    const Vec3 b = mesh.vertex(f[1]) - origin;
    const Vec3 c = mesh.vertex(f[2]) - origin;
    six_v += a.dot(b.cross(c));
  }
  return six_v / 6.0;
}

double signed_volume(const TriangleMesh& mesh) {
  if (mesh.empty()) throw GeometryError("signed_volume: empty mesh");
  const std::size_t open_edges = boundary_edge_count(mesh);
  if (open_edges != 0) {
    throw GeometryError("signed_volume: mesh is not watertight (" + std::to_string(open_edges) +
                        " boundary edges)");
  }
  if (!is_orientation_consistent(mesh)) {
    throw GeometryError("signed_volume: mesh orientation is inconsistent");
  }
  return signed_volume_unchecked(mesh);
}

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
  return 0.5 * (b - a).cross(c - a).norm();
}

double surface_area(const TriangleMesh& mesh) {
  double area = 0.0;
  for (const auto& f : mesh.faces()) {
    area += triangle_area(mesh.vertex(f[0]), mesh.vertex(f[1]), mesh.vertex(f[2]));
  }
  return area;
}

}  // namespace bsv
