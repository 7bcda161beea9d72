#include "bsv/point_cloud.hpp"

#include "bsv/error.hpp"

namespace bsv {

void LabeledPointCloud::validate() const {
  if (!labels.empty() && labels.size() != points.size()) {
    throw InvalidArgument("point cloud has " + std::to_string(labels.size()) + " labels for " +
                          std::to_string(points.size()) + " points");
  }
  if (!colors.empty() && colors.size() != points.size()) {
    throw InvalidArgument("point cloud has " + std::to_string(colors.size()) + " colors for " +
                          std::to_string(points.size()) + " points");
  }
  for (const auto& p : points) {
    if (!p.allFinite()) throw InvalidArgument("point cloud contains a non-finite coordinate");
  }
}

void LabeledPointCloud::append_from(const LabeledPointCloud& other, std::size_t i) {
  points.push_back(other.points[i]);
  if (other.has_labels()) labels.push_back(other.labels[i]);
  if (other.has_colors()) colors.push_back(other.colors[i]);
}

LabeledPointCloud transformed(const LabeledPointCloud& cloud, const RigidTransform& t) {
  LabeledPointCloud out = cloud;
  for (auto& p : out.points) p = t.apply(p);
  return out;
}

LabeledPointCloud select(const LabeledPointCloud& cloud, std::span<const std::size_t> indices) {
  LabeledPointCloud out;
  out.points.reserve(indices.size());
  for (std::size_t i : indices) out.append_from(cloud, i);
  return out;
}

LabeledPointCloud remove_non_finite(const LabeledPointCloud& cloud) {
  LabeledPointCloud out;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (cloud.points[i].allFinite()) out.append_from(cloud, i);
  }
  return out;
}

}  // namespace bsv
