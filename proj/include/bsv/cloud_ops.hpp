#pragma once

#include <string>
#include <vector>

#include "bsv/point_cloud.hpp"

namespace bsv {

struct OutlierRemovalParams {
  std::size_t neighbors = 600;
  double std_ratio = 0.05;
};

/// Statistical outlier removal. For each point, d_i is the mean distance to its
/// k nearest other points; with mu and sigma (sample, n-1) the mean and
/// standard deviation of d over the cloud, point i is kept iff
/// d_i <= mu + std_ratio * sigma. Order and attributes are preserved.
///
/// When the cloud has no more than k points, k drops to size-1 and a warning
/// is appended. Throws InvalidArgument for an empty cloud.
LabeledPointCloud statistical_outlier_removal(const LabeledPointCloud& cloud,
                                              const OutlierRemovalParams& params = {},
                                              std::vector<std::string>* warnings = nullptr);

/// Per-point mean k-NN distance used by the filter above.
std::vector<double> mean_neighbor_distances(const LabeledPointCloud& cloud, std::size_t k);

/// Transforms both views into the shared frame and concatenates them
/// (front first). Labels and colours are kept only if both inputs carry them
/// or one side is empty.
LabeledPointCloud merge(const LabeledPointCloud& front, const LabeledPointCloud& back,
                        const RigidTransform& front_to_world, const RigidTransform& back_to_world);

/// Removes head, hand and foot points. Throws InvalidArgument without labels.
LabeledPointCloud drop_extremities(const LabeledPointCloud& cloud);

}  // namespace bsv
