#pragma once

#include <optional>
#include <vector>

#include "bsv/mesh.hpp"

namespace bsv {

struct RayHit {
  double t = 0.0;  // origin + t * direction
  int face = -1;
};

/// Bounding volume hierarchy over the faces of a mesh for exact first-hit
/// ray queries. Both triangle sides are hit, so visibility follows from the
/// nearest intersection alone.
class TriangleBvh {
 public:
  explicit TriangleBvh(const TriangleMesh& mesh);

  /// Nearest intersection with t > t_min. Equal t resolves to the lower face.
  std::optional<RayHit> intersect(const Vec3& origin, const Vec3& direction,
                                  double t_min = 0.0) const;

 private:
  struct Node {
    BoundingBox box;
    int left = -1;  // -1 for leaves
    int right = -1;
    int begin = 0;
    int end = 0;
  };

  int build(int begin, int end);

  const TriangleMesh* mesh_;
  std::vector<int> order_;
  std::vector<Vec3> centroids_;
  std::vector<Node> nodes_;
};

/// Ray/triangle intersection (Moller-Trumbore). Returns t or nothing.
std::optional<double> intersect_triangle(const Vec3& origin, const Vec3& direction, const Vec3& a,
                                         const Vec3& b, const Vec3& c);

/// Generalized winding number of `point` with respect to a closed mesh:
/// ~1 inside, ~0 outside.
double winding_number(const TriangleMesh& mesh, const Vec3& point);

}  // namespace bsv
