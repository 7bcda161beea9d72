#include "bsv/raycast.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bsv/error.hpp"

namespace bsv {

namespace {

constexpr int kLeafFaces = 4;

bool hits_box(const BoundingBox& box, const Vec3& origin, const Vec3& inv_dir, double t_max) {
  double t0 = 0.0;
  double t1 = t_max;
  for (int a = 0; a < 3; ++a) {
    double near = (box.min[a] - origin[a]) * inv_dir[a];
    double far = (box.max[a] - origin[a]) * inv_dir[a];
    if (near > far) std::swap(near, far);
    // NaN from 0 * inf means the ray runs inside the slab plane; keep going.
    if (!(near <= t1) && !std::isnan(near)) return false;
    if (!(far >= t0) && !std::isnan(far)) return false;
    if (near > t0) t0 = near;
    if (far < t1) t1 = far;
    if (t0 > t1) return false;
  }
  return true;
}

}  // namespace

std::optional<double> intersect_triangle(const Vec3& origin, const Vec3& direction, const Vec3& a,
                                         const Vec3& b, const Vec3& c) {
  const Vec3 e1 = b - a;
  const Vec3 e2 = c - a;
  const Vec3 p = direction.cross(e2);
  const double det = e1.dot(p);
  if (std::abs(det) < 1e-300) return std::nullopt;
  const double inv = 1.0 / det;
  const Vec3 s = origin - a;
  const double u = s.dot(p) * inv;
  if (u < 0.0 || u > 1.0) return std::nullopt;
  const Vec3 q = s.cross(e1);
  const double v = direction.dot(q) * inv;
  if (v < 0.0 || u + v > 1.0) return std::nullopt;
  return e2.dot(q) * inv;
}

TriangleBvh::TriangleBvh(const TriangleMesh& mesh) : mesh_(&mesh) {
  const int n = static_cast<int>(mesh.face_count());
  order_.resize(static_cast<std::size_t>(n));
  centroids_.resize(static_cast<std::size_t>(n));
  for (int f = 0; f < n; ++f) {
    order_[static_cast<std::size_t>(f)] = f;
    const auto& face = mesh.faces()[static_cast<std::size_t>(f)];
    centroids_[static_cast<std::size_t>(f)] =
        (mesh.vertex(face[0]) + mesh.vertex(face[1]) + mesh.vertex(face[2])) / 3.0;
  }
  if (n > 0) {
    nodes_.reserve(static_cast<std::size_t>(2 * n / kLeafFaces + 2));
    build(0, n);
  }
}

int TriangleBvh::build(int begin, int end) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back(Node{});
  BoundingBox box;
  BoundingBox centers;
  for (int i = begin; i < end; ++i) {
    const int f = order_[static_cast<std::size_t>(i)];
    for (int k : mesh_->faces()[static_cast<std::size_t>(f)]) box.extend(mesh_->vertex(k));
    centers.extend(centroids_[static_cast<std::size_t>(f)]);
  }
  nodes_[static_cast<std::size_t>(id)].box = box;
  nodes_[static_cast<std::size_t>(id)].begin = begin;
  nodes_[static_cast<std::size_t>(id)].end = end;
  int axis = 0;
  centers.extent().maxCoeff(&axis);
  if (end - begin <= kLeafFaces || centers.extent()[axis] <= 0.0) return id;

  const int mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](int a, int b) {
                     return centroids_[static_cast<std::size_t>(a)][axis] <
                            centroids_[static_cast<std::size_t>(b)][axis];
                   });
  const int left = build(begin, mid);
  const int right = build(mid, end);
  nodes_[static_cast<std::size_t>(id)].left = left;
  nodes_[static_cast<std::size_t>(id)].right = right;
  return id;
}

std::optional<RayHit> TriangleBvh::intersect(const Vec3& origin, const Vec3& direction,
                                             double t_min) const {
  if (nodes_.empty()) return std::nullopt;
  const Vec3 inv_dir = direction.cwiseInverse();
  RayHit best{std::numeric_limits<double>::infinity(), -1};
  int stack[128];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[static_cast<std::size_t>(stack[--top])];
    if (!hits_box(node.box, origin, inv_dir, best.t)) continue;
    if (node.left < 0) {
      for (int i = node.begin; i < node.end; ++i) {
        const int f = order_[static_cast<std::size_t>(i)];
        const auto& face = mesh_->faces()[static_cast<std::size_t>(f)];
        const auto t = intersect_triangle(origin, direction, mesh_->vertex(face[0]),
                                          mesh_->vertex(face[1]), mesh_->vertex(face[2]));
        if (!t || *t <= t_min) continue;
        if (*t < best.t || (*t == best.t && f < best.face)) best = RayHit{*t, f};
      }
      continue;
    }
    if (top + 2 > 128) throw GeometryError("ray cast: hierarchy too deep");
    stack[top++] = node.right;
    stack[top++] = node.left;
  }
  if (best.face < 0) return std::nullopt;
  return best;
}

double winding_number(const TriangleMesh& mesh, const Vec3& point) {
  double total = 0.0;
  for (const auto& f : mesh.faces()) {
    const Vec3 a = mesh.vertex(f[0]) - point;
    const Vec3 b = mesh.vertex(f[1]) - point;
    const Vec3 c = mesh.vertex(f[2]) - point;
    const double la = a.norm();
    const double lb = b.norm();
    const double lc = c.norm();
    const double num = a.dot(b.cross(c));
    const double den = la * lb * lc + a.dot(b) * lc + b.dot(c) * la + c.dot(a) * lb;
    total += 2.0 * std::atan2(num, den);
  }
  return total / (4.0 * std::numbers::pi);
}

}  // namespace bsv
