#include "bsv/spatial_index.hpp"

#include <algorithm>
#include <limits>

#include "bsv/error.hpp"

namespace bsv {

namespace {
constexpr std::size_t kLeafSize = 12;
}

SpatialIndex::SpatialIndex(std::vector<Vec3> points) : points_(std::move(points)) {
  order_.resize(points_.size());
  for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = i;
  if (!points_.empty()) {
    nodes_.reserve(2 * points_.size() / kLeafSize + 2);
    build(0, points_.size());
  }
}

int SpatialIndex::build(std::size_t begin, std::size_t end) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back(Node{-1, 0.0, begin, end, -1, -1});
  if (end - begin <= kLeafSize) return id;

  BoundingBox box;
  for (std::size_t i = begin; i < end; ++i) box.extend(points_[order_[i]]);
  int axis = 0;
  box.extent().maxCoeff(&axis);
  if (box.extent()[axis] <= 0.0) return id;  // all points coincide

  const std::size_t mid = begin + (end - begin) / 2;
  auto first = order_.begin() + static_cast<std::ptrdiff_t>(begin);
  auto nth = order_.begin() + static_cast<std::ptrdiff_t>(mid);
  auto last = order_.begin() + static_cast<std::ptrdiff_t>(end);
  std::nth_element(first, nth, last, [&](std::size_t a, std::size_t b) {
    return points_[a][axis] < points_[b][axis];
  });
  const double split = points_[order_[mid]][axis];

  const int left = build(begin, mid);
  const int right = build(mid, end);
  Node& node = nodes_[static_cast<std::size_t>(id)];
  node.axis = axis;
  node.split = split;
  node.left = left;
  node.right = right;
  return id;
}

void SpatialIndex::search_nearest(int node_id, const Vec3& q, Neighbor& best) const {
  const Node& node = nodes_[static_cast<std::size_t>(node_id)];
  if (node.axis < 0) {
    for (std::size_t i = node.begin; i < node.end; ++i) {
      const Neighbor cand{squared_distance(points_[order_[i]], q), order_[i]};
      if (cand < best) best = cand;
    }
    return;
  }
  // Left holds values <= split, right values >= split.
  const double diff = q[node.axis] - node.split;
  const int near = diff <= 0.0 ? node.left : node.right;
  const int far = diff <= 0.0 ? node.right : node.left;
  search_nearest(near, q, best);
  if (diff * diff <= best.squared_distance) search_nearest(far, q, best);
}

void SpatialIndex::search_knn(int node_id, const Vec3& q, std::size_t k,
                              std::vector<Neighbor>& heap) const {
  const Node& node = nodes_[static_cast<std::size_t>(node_id)];
  if (node.axis < 0) {
    for (std::size_t i = node.begin; i < node.end; ++i) {
      const Neighbor cand{squared_distance(points_[order_[i]], q), order_[i]};
      if (heap.size() < k) {
        heap.push_back(cand);
        std::push_heap(heap.begin(), heap.end());
      } else if (cand < heap.front()) {
        std::pop_heap(heap.begin(), heap.end());
        heap.back() = cand;
        std::push_heap(heap.begin(), heap.end());
      }
    }
    return;
  }
  const double diff = q[node.axis] - node.split;
  const int near = diff <= 0.0 ? node.left : node.right;
  const int far = diff <= 0.0 ? node.right : node.left;
  search_knn(near, q, k, heap);
  if (heap.size() < k || diff * diff <= heap.front().squared_distance) {
    search_knn(far, q, k, heap);
  }
}

Neighbor SpatialIndex::nearest_neighbor(const Vec3& query) const {
  if (points_.empty()) throw InvalidArgument("nearest: spatial index is empty");
  Neighbor best{std::numeric_limits<double>::infinity(), std::numeric_limits<std::size_t>::max()};
  search_nearest(0, query, best);
  return best;
}

std::size_t SpatialIndex::nearest(const Vec3& query) const { return nearest_neighbor(query).index; }

std::vector<Neighbor> SpatialIndex::k_nearest(const Vec3& query, std::size_t k) const {
  if (points_.empty()) throw InvalidArgument("k_nearest: spatial index is empty");
  k = std::min(k, points_.size());
  std::vector<Neighbor> heap;
  heap.reserve(k);
  if (k == 0) return heap;
  search_knn(0, query, k, heap);
  std::sort_heap(heap.begin(), heap.end());
  return heap;
}

}  // namespace bsv
