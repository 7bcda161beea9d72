#pragma once

#include "bsv/mesh.hpp"

namespace bsv {

/// x -> R x + t. The rotation is kept orthonormal with det +1.
struct RigidTransform {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  static RigidTransform identity() { return {}; }
  /// Rotation about the axis (right-hand rule) by `radians`.
  static RigidTransform from_axis_angle(const Vec3& axis, double radians,
                                        const Vec3& translation = Vec3::Zero());

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
  RigidTransform inverse() const;
  /// (*this) o other: applies `other` first.
  RigidTransform compose(const RigidTransform& other) const;

  /// Throws InvalidArgument when R^T R != I or det R != +1 beyond 1e-9.
  void validate() const;
  bool is_valid(double tolerance = 1e-9) const;
};

}  // namespace bsv
