#include "bsv/cloud_ops.hpp"

#include <algorithm>
#include <cmath>

#include "bsv/error.hpp"
#include "bsv/spatial_index.hpp"

namespace bsv {

std::vector<double> mean_neighbor_distances(const LabeledPointCloud& cloud, std::size_t k) {
  const SpatialIndex index(cloud.points);
  std::vector<double> means(cloud.size(), 0.0);
  if (k == 0) return means;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    // The query point itself comes back first (distance 0, lowest index among
    // duplicates is not guaranteed to be i), so ask for k+1 and skip i.
    const auto nn = index.k_nearest(cloud.points[i], k + 1);
    double sum = 0.0;
    std::size_t used = 0;
    for (const auto& n : nn) {
      if (n.index == i) continue;
      if (used == k) break;
      sum += std::sqrt(n.squared_distance);
      ++used;
    }
    means[i] = used > 0 ? sum / static_cast<double>(used) : 0.0;
  }
  return means;
}

LabeledPointCloud statistical_outlier_removal(const LabeledPointCloud& cloud,
                                              const OutlierRemovalParams& params,
                                              std::vector<std::string>* warnings) {
  if (cloud.empty()) throw InvalidArgument("statistical_outlier_removal: empty cloud");
  cloud.validate();
  std::size_t k = params.neighbors;
  if (cloud.size() <= k) {
    k = cloud.size() - 1;
    if (warnings != nullptr) {
      warnings->push_back("outlier removal: cloud has only " + std::to_string(cloud.size()) +
                          " points, neighbors reduced to " + std::to_string(k));
    }
  }
  if (k == 0) return cloud;

  const auto means = mean_neighbor_distances(cloud, k);
  // Sum in sorted order so the threshold does not depend on point order.
  auto sorted = means;
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());
  double total = 0.0;
  for (double d : sorted) total += d;
  const double mu = total / n;
  double sq = 0.0;
  for (double d : sorted) sq += (d - mu) * (d - mu);
  const double sigma = sorted.size() > 1 ? std::sqrt(sq / (n - 1.0)) : 0.0;
  const double threshold = mu + params.std_ratio * sigma;

  LabeledPointCloud out;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (means[i] <= threshold) out.append_from(cloud, i);
  }
  return out;
}

LabeledPointCloud merge(const LabeledPointCloud& front, const LabeledPointCloud& back,
                        const RigidTransform& front_to_world, const RigidTransform& back_to_world) {
  front_to_world.validate();
  back_to_world.validate();
  front.validate();
  back.validate();
  const bool labels = (front.has_labels() || front.empty()) && (back.has_labels() || back.empty()) &&
                      (front.has_labels() || back.has_labels());
  const bool colors = (front.has_colors() || front.empty()) && (back.has_colors() || back.empty()) &&
                      (front.has_colors() || back.has_colors());
  LabeledPointCloud out;
  out.points.reserve(front.size() + back.size());
  auto add = [&](const LabeledPointCloud& part, const RigidTransform& t) {
    for (std::size_t i = 0; i < part.size(); ++i) {
      out.points.push_back(t.apply(part.points[i]));
      if (labels) out.labels.push_back(part.labels[i]);
      if (colors) out.colors.push_back(part.colors[i]);
    }
  };
  add(front, front_to_world);
  add(back, back_to_world);
  return out;
}

LabeledPointCloud drop_extremities(const LabeledPointCloud& cloud) {
  if (!cloud.has_labels() && !cloud.empty()) {
    throw InvalidArgument("drop_extremities: cloud carries no segment labels");
  }
  LabeledPointCloud out;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (!is_extremity(cloud.labels[i])) out.append_from(cloud, i);
  }
  return out;
}

}  // namespace bsv
