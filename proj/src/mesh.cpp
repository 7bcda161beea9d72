#include "bsv/mesh.hpp"

#include <algorithm>
#include <string>
#include <unordered_set>

#include "bsv/error.hpp"

namespace bsv {

namespace {

std::uint64_t directed_key(int a, int b) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

}  // namespace

TriangleMesh::TriangleMesh(std::vector<Vec3> vertices, std::vector<Face> faces,
                           std::vector<SegmentLabel> labels)
    : vertices_(std::move(vertices)), faces_(std::move(faces)), labels_(std::move(labels)) {
  const auto n = static_cast<long long>(vertices_.size());
  for (std::size_t f = 0; f < faces_.size(); ++f) {
    const auto& face = faces_[f];
    for (int idx : face) {
      if (idx < 0 || idx >= n) {
        throw InvalidArgument("face " + std::to_string(f) + " references vertex " +
                              std::to_string(idx) + " but the mesh has " + std::to_string(n) +
                              " vertices");
      }
    }
    if (face[0] == face[1] || face[1] == face[2] || face[0] == face[2]) {
      throw InvalidArgument("face " + std::to_string(f) + " is degenerate (repeated index)");
    }
  }
  if (!labels_.empty() && labels_.size() != vertices_.size()) {
    throw InvalidArgument("label count " + std::to_string(labels_.size()) +
                          " does not match vertex count " + std::to_string(n));
  }
  for (const auto& v : vertices_) {
    if (!v.allFinite()) throw InvalidArgument("mesh vertex with non-finite coordinate");
  }
}

TriangleMesh TriangleMesh::with_vertices(std::vector<Vec3> vertices) const {
  if (vertices.size() != vertices_.size()) {
    throw InvalidArgument("with_vertices: vertex count changed");
  }
  return TriangleMesh(std::move(vertices), faces_, labels_);
}

TriangleMesh TriangleMesh::with_labels(std::vector<SegmentLabel> labels) const {
  return TriangleMesh(vertices_, faces_, std::move(labels));
}

TriangleMesh TriangleMesh::without_labels() const { return TriangleMesh(vertices_, faces_); }

TriangleMesh TriangleMesh::flipped() const {
  auto faces = faces_;
  for (auto& f : faces) std::swap(f[1], f[2]);
  return TriangleMesh(vertices_, std::move(faces), labels_);
}

SegmentLabel TriangleMesh::face_label(std::size_t face) const {
  const auto& f = faces_.at(face);
  const SegmentLabel a = labels_.at(f[0]);
  const SegmentLabel b = labels_.at(f[1]);
  const SegmentLabel c = labels_.at(f[2]);
  if (a == b || a == c) return a;
  if (b == c) return b;
  return std::min({a, b, c}, [](SegmentLabel x, SegmentLabel y) { return ordinal(x) < ordinal(y); });
}

int MeshTopology::find_edge(int a, int b) const {
  const Edge e = make_edge(a, b);
  auto it = std::lower_bound(edges.begin(), edges.end(), e);
  if (it == edges.end() || *it != e) return -1;
  return static_cast<int>(it - edges.begin());
}

MeshTopology build_topology(const TriangleMesh& mesh) {
  MeshTopology topo;
  std::vector<std::pair<Edge, int>> incidences;
  incidences.reserve(mesh.face_count() * 3);
  for (std::size_t f = 0; f < mesh.face_count(); ++f) {
    const auto& face = mesh.faces()[f];
    for (int k = 0; k < 3; ++k) {
      incidences.emplace_back(make_edge(face[k], face[(k + 1) % 3]), static_cast<int>(f));
    }
  }
  std::sort(incidences.begin(), incidences.end());
  for (const auto& [edge, face] : incidences) {
    if (topo.edges.empty() || topo.edges.back() != edge) {
      topo.edges.push_back(edge);
      topo.edge_faces.emplace_back();
    }
    topo.edge_faces.back().push_back(face);
  }
  topo.neighbors.assign(mesh.vertex_count(), {});
  for (const auto& [a, b] : topo.edges) {
    topo.neighbors[a].push_back(b);
    topo.neighbors[b].push_back(a);
  }
  for (auto& ring : topo.neighbors) std::sort(ring.begin(), ring.end());
  return topo;
}

bool is_orientation_consistent(const TriangleMesh& mesh) {
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(mesh.face_count() * 3);
  for (const auto& face : mesh.faces()) {
    for (int k = 0; k < 3; ++k) {
      if (!seen.insert(directed_key(face[k], face[(k + 1) % 3])).second) return false;
    }
  }
  return true;
}

BoundingBox bounding_box(std::span<const Vec3> points) {
  BoundingBox box;
  for (const auto& p : points) box.extend(p);
  return box;
}

TriangleMesh transformed(const TriangleMesh& mesh, const Mat3& rotation, const Vec3& translation,
                         double scale) {
  std::vector<Vec3> out;
  out.reserve(mesh.vertex_count());
  for (const auto& v : mesh.vertices()) out.push_back(scale * (rotation * v) + translation);
  return mesh.with_vertices(std::move(out));
}

double mean_edge_length(const TriangleMesh& mesh) {
  const auto topo = build_topology(mesh);
  if (topo.edges.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& [a, b] : topo.edges) sum += (mesh.vertex(a) - mesh.vertex(b)).norm();
  return sum / static_cast<double>(topo.edges.size());
}

}  // namespace bsv
