#include "bsv/rigid_transform.hpp"

#include <Eigen/Geometry>
#include <cmath>

#include "bsv/error.hpp"

namespace bsv {

RigidTransform RigidTransform::from_axis_angle(const Vec3& axis, double radians,
                                               const Vec3& translation) {
  RigidTransform t;
  t.rotation = Eigen::AngleAxisd(radians, axis.normalized()).toRotationMatrix();
  t.translation = translation;
  return t;
}

RigidTransform RigidTransform::inverse() const {
  RigidTransform inv;
  inv.rotation = rotation.transpose();
  inv.translation = -(inv.rotation * translation);
  return inv;
}

RigidTransform RigidTransform::compose(const RigidTransform& other) const {
  RigidTransform out;
  out.rotation = rotation * other.rotation;
  out.translation = rotation * other.translation + translation;
  return out;
}

bool RigidTransform::is_valid(double tolerance) const {
  if (!rotation.allFinite() || !translation.allFinite()) return false;
  const double ortho = (rotation.transpose() * rotation - Mat3::Identity()).cwiseAbs().maxCoeff();
  return ortho <= tolerance && std::abs(rotation.determinant() - 1.0) <= tolerance;
}

void RigidTransform::validate() const {
  if (!is_valid()) throw InvalidArgument("rigid transform rotation is not orthonormal with det +1");
}

}  // namespace bsv
