#include "bsv/align.hpp"

#include "bsv/error.hpp"

namespace bsv {

std::pair<TriangleMesh, Vec3> center_to_origin(const TriangleMesh& mesh) {
  if (mesh.vertex_count() == 0) throw InvalidArgument("center_to_origin: empty mesh");
  const Vec3 t = -bounding_box(mesh.vertices()).center();
  return {transformed(mesh, Mat3::Identity(), t), t};
}

std::pair<LabeledPointCloud, Vec3> center_to_origin(const LabeledPointCloud& cloud) {
  if (cloud.empty()) throw InvalidArgument("center_to_origin: empty cloud");
  const Vec3 t = -bounding_box(cloud.points).center();
  RigidTransform shift;
  shift.translation = t;
  return {transformed(cloud, shift), t};
}

std::pair<TriangleMesh, AlignmentParams> scale_template(const TriangleMesh& tmpl,
                                                        const LabeledPointCloud& target) {
  if (tmpl.vertex_count() == 0 || target.empty()) {
    throw InvalidArgument("scale_template: empty input");
  }
  const BoundingBox tb = bounding_box(tmpl.vertices());
  const BoundingBox cb = bounding_box(target.points);
  if (!(tb.diagonal() > 0.0) || !(cb.diagonal() > 0.0)) {
    throw InvalidArgument("scale_template: bounding box has zero diagonal");
  }
  AlignmentParams params;
  params.scale = cb.diagonal() / tb.diagonal();
  params.pre_translation = -tb.center();
  params.post_translation = cb.center();
  std::vector<Vec3> moved;
  moved.reserve(tmpl.vertex_count());
  for (const auto& p : tmpl.vertices()) moved.push_back(params.apply(p));
  return {tmpl.with_vertices(std::move(moved)), params};
}

}  // namespace bsv
