#include "bsv/laplacian.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bsv/error.hpp"

namespace bsv {

double EdgeWeightMap::weight(int a, int b) const {
  const Edge e = make_edge(a, b);
  auto it = std::lower_bound(edges.begin(), edges.end(), e);
  if (it == edges.end() || *it != e) return 0.0;
  return edge_weights[static_cast<std::size_t>(it - edges.begin())];
}

double clamped_cotangent(const Vec3& apex, const Vec3& a, const Vec3& b) {
  const Vec3 u = a - apex;
  const Vec3 v = b - apex;
  const double cross = u.cross(v).norm();
  const double dot = u.dot(v);
  if (cross <= 0.0) {
    return dot >= 0.0 ? kCotangentClamp : -kCotangentClamp;
  }
  return std::clamp(dot / cross, -kCotangentClamp, kCotangentClamp);
}

EdgeWeightMap cotangent_weights(const TriangleMesh& mesh) {
  const auto topo = build_topology(mesh);
  EdgeWeightMap map;
  map.edges = topo.edges;
  map.edge_weights.assign(topo.edges.size(), 0.0);
  map.cell_weights.assign(mesh.vertex_count(), 1.0);

  for (std::size_t e = 0; e < topo.edges.size(); ++e) {
    const auto [a, b] = topo.edges[e];
    const auto& faces = topo.edge_faces[e];
    if (faces.size() > 2) {
      throw GeometryError("non-manifold edge (" + std::to_string(a) + ", " + std::to_string(b) +
                          ") shared by " + std::to_string(faces.size()) + " faces");
    }
    double w = 0.0;
    for (int f : faces) {
      const auto& face = mesh.faces()[static_cast<std::size_t>(f)];
      int apex = -1;
      for (int idx : face) {
        if (idx != a && idx != b) apex = idx;
      }
      w += 0.5 * clamped_cotangent(mesh.vertex(apex), mesh.vertex(a), mesh.vertex(b));
    }
    map.edge_weights[e] = w;
  }
  return map;
}

SparseLaplacian build_laplacian(const TriangleMesh& mesh, const EdgeWeightMap& weights) {
  const auto n = static_cast<Eigen::Index>(mesh.vertex_count());
  if (weights.vertex_count() != mesh.vertex_count() ||
      weights.edges.size() != weights.edge_weights.size()) {
    throw InvalidArgument("build_laplacian: weight map was computed for a different mesh");
  }
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(weights.edges.size() * 4);
  for (std::size_t e = 0; e < weights.edges.size(); ++e) {
    const auto [a, b] = weights.edges[e];
    if (a >= n || b >= n) {
      throw InvalidArgument("build_laplacian: weight map was computed for a different mesh");
    }
    const double w = weights.edge_weights[e];
    triplets.emplace_back(a, b, -w);
    triplets.emplace_back(b, a, -w);
    triplets.emplace_back(a, a, w);
    triplets.emplace_back(b, b, w);
  }
  SparseLaplacian lap;
  lap.matrix.resize(n, n);
  lap.matrix.setFromTriplets(triplets.begin(), triplets.end());
  lap.matrix.makeCompressed();
  return lap;
}

}  // namespace bsv
