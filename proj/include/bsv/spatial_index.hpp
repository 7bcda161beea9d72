#pragma once

#include <span>
#include <utility>
#include <vector>

#include "bsv/mesh.hpp"

namespace bsv {

/// Squared Euclidean distance, evaluated in a fixed order so that every
/// caller (index and brute-force scans alike) gets bit-identical values.
inline double squared_distance(const Vec3& a, const Vec3& b) {
  const double dx = a.x() - b.x();
  const double dy = a.y() - b.y();
  const double dz = a.z() - b.z();
  return dx * dx + dy * dy + dz * dz;
}

struct Neighbor {
  double squared_distance;
  std::size_t index;

  friend bool operator<(const Neighbor& a, const Neighbor& b) {
    return a.squared_distance < b.squared_distance ||
           (a.squared_distance == b.squared_distance && a.index < b.index);
  }
};

/// Balanced k-d tree over a fixed point set. Queries are exact: results match
/// a linear scan, with equal distances resolved towards the lower index.
/// Queries are const and safe to run concurrently.
class SpatialIndex {
 public:
  SpatialIndex() = default;
  explicit SpatialIndex(std::vector<Vec3> points);
  explicit SpatialIndex(std::span<const Vec3> points)
      : SpatialIndex(std::vector<Vec3>(points.begin(), points.end())) {}

  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }
  const Vec3& point(std::size_t i) const { return points_[i]; }

  /// Index of the closest stored point. Throws InvalidArgument when empty.
  std::size_t nearest(const Vec3& query) const;
  Neighbor nearest_neighbor(const Vec3& query) const;

  /// The k closest points ordered by (distance, index). k is clamped to size().
  std::vector<Neighbor> k_nearest(const Vec3& query, std::size_t k) const;

 private:
  struct Node {
    int axis = -1;  // -1 for leaves
    double split = 0.0;
    std::size_t begin = 0;
    std::size_t end = 0;
    int left = -1;
    int right = -1;
  };

  int build(std::size_t begin, std::size_t end);
  void search_nearest(int node, const Vec3& q, Neighbor& best) const;
  void search_knn(int node, const Vec3& q, std::size_t k, std::vector<Neighbor>& heap) const;

  std::vector<Vec3> points_;
  std::vector<std::size_t> order_;  // leaf ranges index into this permutation
  std::vector<Node> nodes_;
};

}  // namespace bsv
