#include "bsv/primitives.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "bsv/error.hpp"
#include "bsv/measures.hpp"

namespace bsv {

namespace {

TriangleMesh outward(TriangleMesh mesh) {
  if (signed_volume_unchecked(mesh) < 0.0) return mesh.flipped();
  return mesh;
}

}  // namespace

TriangleMesh make_box(const Vec3& size, const std::array<int, 3>& divisions) {
  for (int d : divisions) {
    if (d < 1) throw InvalidArgument("make_box: divisions must be >= 1");
  }
  if ((size.array() <= 0.0).any()) throw InvalidArgument("make_box: size must be positive");

  std::map<std::array<int, 3>, int> index;
  std::vector<Vec3> vertices;
  auto vertex_at = [&](const std::array<int, 3>& lattice) {
    auto [it, inserted] = index.try_emplace(lattice, static_cast<int>(vertices.size()));
    if (inserted) {
      Vec3 p;
      for (int a = 0; a < 3; ++a) {
        p[a] = size[a] * (static_cast<double>(lattice[a]) / divisions[a] - 0.5);
      }
      vertices.push_back(p);
    }
    return it->second;
  };

  std::vector<Face> faces;
  for (int axis = 0; axis < 3; ++axis) {
    for (int side = 0; side < 2; ++side) {
      int u = (axis + 1) % 3;
      int v = (axis + 2) % 3;
      if (side == 0) std::swap(u, v);  // keep u x v pointing outward
      for (int i = 0; i < divisions[u]; ++i) {
        for (int j = 0; j < divisions[v]; ++j) {
          auto corner = [&](int di, int dj) {
            std::array<int, 3> l{};
            l[axis] = side == 0 ? 0 : divisions[axis];
            l[u] = i + di;
            l[v] = j + dj;
            return vertex_at(l);
          };
          const int p00 = corner(0, 0);
          const int p10 = corner(1, 0);
          const int p11 = corner(1, 1);
          const int p01 = corner(0, 1);
          faces.push_back({p00, p10, p11});
          faces.push_back({p00, p11, p01});
        }
      }
    }
  }
  return outward(TriangleMesh(std::move(vertices), std::move(faces)));
}

TriangleMesh make_box_with_edge(const Vec3& size, double target_edge) {
  std::array<int, 3> div{};
  for (int a = 0; a < 3; ++a) {
    div[a] = std::max(1, static_cast<int>(std::lround(size[a] / target_edge)));
  }
  return make_box(size, div);
}

TriangleMesh make_cube(double side, int divisions) {
  return make_box(Vec3::Constant(side), {divisions, divisions, divisions});
}

TriangleMesh make_icosphere(int levels, double radius, const Vec3& center) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> vertices = {
      {-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
      {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (auto& v : vertices) v.normalize();
  std::vector<Face> faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                             {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                             {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                             {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (int level = 0; level < levels; ++level) {
    std::map<Edge, int> midpoint;
    auto mid = [&](int a, int b) {
      auto [it, inserted] = midpoint.try_emplace(make_edge(a, b), static_cast<int>(vertices.size()));
      if (inserted) vertices.push_back((vertices[a] + vertices[b]).normalized());
      return it->second;
    };
    std::vector<Face> next;
    next.reserve(faces.size() * 4);
    for (const auto& f : faces) {
      const int ab = mid(f[0], f[1]);
      const int bc = mid(f[1], f[2]);
      const int ca = mid(f[2], f[0]);
      next.push_back({f[0], ab, ca});
      next.push_back({f[1], bc, ab});
      next.push_back({f[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    faces = std::move(next);
  }
  for (auto& v : vertices) v = center + radius * v;
  return outward(TriangleMesh(std::move(vertices), std::move(faces)));
}

TriangleMesh make_open_cylinder(int segments, int rings, double radius, double height) {
  if (segments < 3 || rings < 1) throw InvalidArgument("make_open_cylinder: too few segments");
  std::vector<Vec3> vertices;
  for (int r = 0; r <= rings; ++r) {
    const double y = height * static_cast<double>(r) / rings;
    for (int k = 0; k < segments; ++k) {
      const double theta = 2.0 * std::numbers::pi * k / segments;
      vertices.emplace_back(radius * std::cos(theta), y, radius * std::sin(theta));
    }
  }
  auto id = [&](int k, int r) { return r * segments + (k % segments); };
  std::vector<Face> faces;
  for (int r = 0; r < rings; ++r) {
    for (int k = 0; k < segments; ++k) {
      faces.push_back({id(k, r), id(k, r + 1), id(k + 1, r + 1)});
      faces.push_back({id(k, r), id(k + 1, r + 1), id(k + 1, r)});
    }
  }
  return TriangleMesh(std::move(vertices), std::move(faces));
}

TriangleMesh make_regular_tetrahedron() {
  const double s = 1.0 / (2.0 * std::sqrt(2.0));
  std::vector<Vec3> vertices = {{s, s, s}, {s, -s, -s}, {-s, s, -s}, {-s, -s, s}};
  std::vector<Face> faces = {{0, 1, 2}, {0, 3, 1}, {0, 2, 3}, {1, 3, 2}};
  return outward(TriangleMesh(std::move(vertices), std::move(faces)));
}

}  // namespace bsv
