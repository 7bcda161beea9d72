#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Geometry>

#include "bsv/mesh.hpp"
#include "bsv/point_cloud.hpp"
#include "bsv/primitives.hpp"
#include "bsv/topology.hpp"

namespace bsv::test {

inline std::vector<Vec3> random_points(std::size_t n, std::mt19937_64& rng, double lo = -1.0,
                                       double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<Vec3> out(n);
  for (auto& p : out) p = Vec3(u(rng), u(rng), u(rng));
  return out;
}

inline Mat3 random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::Quaterniond q(g(rng), g(rng), g(rng), g(rng));
  q.normalize();
  return q.toRotationMatrix();
}

/// Same connectivity, every vertex moved by up to `amount` per axis.
inline TriangleMesh jittered(const TriangleMesh& mesh, double amount, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-amount, amount);
  auto v = mesh.vertices();
  for (auto& p : v) p += Vec3(u(rng), u(rng), u(rng));
  return mesh.with_vertices(std::move(v));
}

inline LabeledPointCloud cloud_of(std::vector<Vec3> points) {
  LabeledPointCloud c;
  c.points = std::move(points);
  return c;
}

// Angle at `apex` via acos, for oracles that must not share the library's
// cross/dot formulation.
inline double angle_at(const Vec3& apex, const Vec3& a, const Vec3& b) {
  const Vec3 u = (a - apex).normalized();
  const Vec3 v = (b - apex).normalized();
  return std::acos(std::clamp(u.dot(v), -1.0, 1.0));
}

inline TriangleMesh drop_faces(const TriangleMesh& mesh, const std::vector<int>& drop) {
  std::vector<int> keep;
  for (int f = 0; f < static_cast<int>(mesh.face_count()); ++f) {
    if (std::find(drop.begin(), drop.end(), f) == drop.end()) keep.push_back(f);
  }
  return submesh(mesh, keep);
}

inline TriangleMesh upper_half(const TriangleMesh& mesh) {
  std::vector<int> keep;
  for (int f = 0; f < static_cast<int>(mesh.face_count()); ++f) {
    const auto& t = mesh.faces()[static_cast<std::size_t>(f)];
    const double y = (mesh.vertex(t[0]).y() + mesh.vertex(t[1]).y() + mesh.vertex(t[2]).y()) / 3.0;
    if (y > 0.0) keep.push_back(f);
  }
  return submesh(mesh, keep);
}

/// Open meshes with one or more holes of different shapes.
inline std::vector<TriangleMesh> hole_fixtures() {
  return {
      drop_faces(make_cube(1.0, 2), {0}),
      drop_faces(make_cube(1.0, 3), {0, 1}),  // one quad: a 4-vertex loop
      drop_faces(make_cube(1.0, 4), {0, 40, 80}),
      make_open_cylinder(24, 5, 0.3, 1.0),
      upper_half(make_icosphere(3, 1.0)),
      drop_faces(make_regular_tetrahedron(), {2}),
  };
}

}  // namespace bsv::test
