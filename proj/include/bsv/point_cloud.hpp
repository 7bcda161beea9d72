#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bsv/labels.hpp"
#include "bsv/mesh.hpp"
#include "bsv/rigid_transform.hpp"

namespace bsv {

using Rgb = std::array<std::uint8_t, 3>;

/// Points in meters with optional per-point labels and colours.
struct LabeledPointCloud {
  std::vector<Vec3> points;
  std::vector<SegmentLabel> labels;  // empty or one per point
  std::vector<Rgb> colors;           // empty or one per point

  std::size_t size() const noexcept { return points.size(); }
  bool empty() const noexcept { return points.empty(); }
  bool has_labels() const noexcept { return !labels.empty(); }
  bool has_colors() const noexcept { return !colors.empty(); }

  /// Throws InvalidArgument if attribute arrays have the wrong length or a
  /// coordinate is not finite.
  void validate() const;

  void push_back(const Vec3& p) { points.push_back(p); }
  /// Copies point `i` of `other` (with its attributes) to the end.
  void append_from(const LabeledPointCloud& other, std::size_t i);
};

LabeledPointCloud transformed(const LabeledPointCloud& cloud, const RigidTransform& t);

/// Subset in the given order.
LabeledPointCloud select(const LabeledPointCloud& cloud, std::span<const std::size_t> indices);

/// Drops points whose coordinates are NaN or infinite.
LabeledPointCloud remove_non_finite(const LabeledPointCloud& cloud);

}  // namespace bsv
