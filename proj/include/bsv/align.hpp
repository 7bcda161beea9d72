#pragma once

#include <utility>

#include "bsv/mesh.hpp"
#include "bsv/point_cloud.hpp"

namespace bsv {

/// x -> scale * (x + pre_translation) + post_translation.
struct AlignmentParams {
  double scale = 1.0;
  Vec3 pre_translation = Vec3::Zero();
  Vec3 post_translation = Vec3::Zero();

  Vec3 apply(const Vec3& x) const { return scale * (x + pre_translation) + post_translation; }
};

/// Moves the shape so its axis-aligned bounding-box center is the origin.
/// Returns the shifted shape and the translation applied. Throws
/// InvalidArgument for empty input.
std::pair<TriangleMesh, Vec3> center_to_origin(const TriangleMesh& mesh);
std::pair<LabeledPointCloud, Vec3> center_to_origin(const LabeledPointCloud& cloud);

/// Uniformly scales the template by the ratio of the bounding-box diagonals
/// (target / template) and then puts its box center on the target's. No
/// rotation is applied. Throws InvalidArgument for a zero diagonal.
std::pair<TriangleMesh, AlignmentParams> scale_template(const TriangleMesh& tmpl,
                                                        const LabeledPointCloud& target);

}  // namespace bsv
