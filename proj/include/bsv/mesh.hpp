#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "bsv/labels.hpp"

namespace bsv {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Face = std::array<int, 3>;

/// Indexed triangle mesh. Faces are counter-clockwise when seen from outside.
///
/// Construction validates index ranges and rejects degenerate faces; the mesh
/// is immutable afterwards. Orientation consistency is a separate check
/// (`is_orientation_consistent`) because intermediate meshes produced while
/// cutting segments are allowed to be open.
class TriangleMesh {
 public:
  TriangleMesh() = default;
  TriangleMesh(std::vector<Vec3> vertices, std::vector<Face> faces,
               std::vector<SegmentLabel> labels = {});

  const std::vector<Vec3>& vertices() const noexcept { return vertices_; }
  const std::vector<Face>& faces() const noexcept { return faces_; }
  const std::vector<SegmentLabel>& labels() const noexcept { return labels_; }

  std::size_t vertex_count() const noexcept { return vertices_.size(); }
  std::size_t face_count() const noexcept { return faces_.size(); }
  bool has_labels() const noexcept { return !labels_.empty(); }
  bool empty() const noexcept { return faces_.empty(); }

  const Vec3& vertex(int i) const { return vertices_[static_cast<std::size_t>(i)]; }

  /// Same connectivity and labels, new positions.
  TriangleMesh with_vertices(std::vector<Vec3> vertices) const;
  TriangleMesh with_labels(std::vector<SegmentLabel> labels) const;
  TriangleMesh without_labels() const;
  /// Every face reversed.
  TriangleMesh flipped() const;

  /// Majority label of a face: a label carried by at least two of its
  /// vertices, otherwise the lowest ordinal among the three.
  SegmentLabel face_label(std::size_t face) const;

 private:
  std::vector<Vec3> vertices_;
  std::vector<Face> faces_;
  std::vector<SegmentLabel> labels_;
};

/// Undirected edge with `first < second`.
using Edge = std::pair<int, int>;

inline Edge make_edge(int a, int b) { return a < b ? Edge{a, b} : Edge{b, a}; }

/// Edge/face incidence derived from a mesh.
struct MeshTopology {
  std::vector<Edge> edges;                     // sorted lexicographically
  std::vector<std::vector<int>> edge_faces;    // faces incident to each edge
  std::vector<std::vector<int>> neighbors;     // sorted 1-ring per vertex

  /// Index of edge (a,b) in `edges`, or -1.
  int find_edge(int a, int b) const;
};

MeshTopology build_topology(const TriangleMesh& mesh);

/// True when no directed edge appears in more than one face.
bool is_orientation_consistent(const TriangleMesh& mesh);

/// Axis-aligned bounds of a point set.
struct BoundingBox {
  Vec3 min = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 max = Vec3::Constant(-std::numeric_limits<double>::infinity());

  void extend(const Vec3& p) {
    min = min.cwiseMin(p);
    max = max.cwiseMax(p);
  }
  bool valid() const { return (min.array() <= max.array()).all(); }
  Vec3 center() const { return 0.5 * (min + max); }
  Vec3 extent() const { return max - min; }
  double diagonal() const { return extent().norm(); }
};

BoundingBox bounding_box(std::span<const Vec3> points);

/// Applies `x -> scale * x + translation` to every vertex.
TriangleMesh transformed(const TriangleMesh& mesh, const Mat3& rotation, const Vec3& translation,
                         double scale = 1.0);

/// Mean length of all undirected edges.
double mean_edge_length(const TriangleMesh& mesh);

}  // namespace bsv
