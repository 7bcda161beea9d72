#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "bsv/image.hpp"
#include "bsv/mesh.hpp"
#include "bsv/point_cloud.hpp"
#include "bsv/rigid_transform.hpp"

namespace bsv {

/// Pinhole intrinsics in pixels. The default is a portrait 768x1024 sensor
/// (a landscape depth camera turned on its side).
struct Intrinsics {
  double fx = 730.0;
  double fy = 730.0;
  double cx = 383.5;
  double cy = 511.5;
  int width = 768;
  int height = 1024;

  /// Throws InvalidArgument unless fx, fy > 0 and the principal point lies
  /// inside the image.
  void validate() const;
};

/// Camera looking down its +z axis, x to the image right, y to the image
/// bottom. `pose` maps camera coordinates to world coordinates.
struct VirtualCamera {
  Intrinsics intrinsics;
  RigidTransform pose;

  /// Camera-frame ray through pixel (u, v), scaled so that z = 1; the ray
  /// parameter of a hit is then its depth.
  Vec3 ray(double u, double v) const;
  /// Pixel coordinates of a world point, nothing if it is behind the camera.
  std::optional<Eigen::Vector2d> project(const Vec3& world) const;
};

enum class ErrorCondition { NoEr, Cali, L515, L5Ca };

std::string_view condition_name(ErrorCondition c);  // "NoEr", "Cali", ...
/// Accepts the names above case-insensitively.
std::optional<ErrorCondition> parse_condition(std::string_view text);
bool has_depth_noise(ErrorCondition c);
bool has_calibration_error(ErrorCondition c);

/// Calibration error of one camera, expressed along body axes: x vertical,
/// y transversal, z longitudinal (along the optical axis).
struct CalibrationOffset {
  Vec3 translation_cm = Vec3::Zero();
  Vec3 rotation_deg = Vec3::Zero();
};

/// Mean calibration errors measured for the two cameras of the rig.
CalibrationOffset default_front_offset();
CalibrationOffset default_back_offset();

/// Camera-frame rigid transform E of an offset. Body x maps to camera y,
/// body y to camera x, body z to camera z; rotations are applied about
/// the vertical, then transversal, then longitudinal axis.
RigidTransform calibration_transform(const CalibrationOffset& offset);

struct NoiseModel {
  /// Standard deviation of the depth noise at 1 m; grows linearly with depth.
  double depth_sigma_at_1m = 0.005;
  CalibrationOffset front_offset = default_front_offset();
  CalibrationOffset back_offset = default_back_offset();
  /// Per-capture Gaussian jitter added to the offsets (off by default).
  CalibrationOffset front_jitter;
  CalibrationOffset back_jitter;

  void validate() const;
};

/// Two cameras facing each other along world z, both at the same height.
/// World y is up and the subject faces +z, towards the front camera.
struct RigConfig {
  double separation = 4.006;
  double camera_height = 1.0;
  Intrinsics intrinsics;
};

VirtualCamera front_camera(const RigConfig& rig);
VirtualCamera back_camera(const RigConfig& rig);

struct RenderResult {
  DepthImage depth;      // 0 where the ray misses
  Image<int> face;       // hit face index, -1 where the ray misses
};

/// Ray-casts every pixel against the mesh. Throws GeometryError when the
/// camera center lies inside the mesh.
RenderResult render(const TriangleMesh& mesh, const VirtualCamera& camera);
DepthImage render_depth(const TriangleMesh& mesh, const VirtualCamera& camera);

/// Back-projects every pixel with nonzero depth, x = pose((u-cx)z/fx, (v-cy)z/fy, z).
/// Throws InvalidArgument when the image size differs from the intrinsics.
LabeledPointCloud deproject(const DepthImage& depth, const VirtualCamera& camera);
/// Same, keeping only pixels whose label is not Background and attaching it.
LabeledPointCloud deproject(const DepthImage& depth, const VirtualCamera& camera,
                            const ByteImage& labels);

/// Adds zero-mean Gaussian noise with sigma = sigma_at_1m * depth to every
/// nonzero pixel. The stream is indexed by (seed, stream, pixel), so results
/// do not depend on evaluation order.
DepthImage add_depth_noise(const DepthImage& depth, double sigma_at_1m, std::uint64_t seed,
                           std::uint64_t stream);

/// Standard normal sample for a counter-based stream (used by the noise model).
double gaussian_sample(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

/// Label mask of a render: each hit pixel gets the majority label of its face.
/// The mesh must be labeled.
ByteImage face_label_mask(const TriangleMesh& mesh, const Image<int>& faces);

struct CapturedView {
  VirtualCamera camera;          // true pose
  RigidTransform reported_pose;  // what calibration says the pose is
  DepthImage depth;              // after noise
  Image<int> face;
  ByteImage labels;              // ideal labels from the mesh, empty if unlabeled
  LabeledPointCloud cloud;       // camera frame
};

struct Capture {
  CapturedView front;
  CapturedView back;
};

/// Renders the mesh from both rig cameras and applies the error condition:
/// depth noise for L515/L5Ca, calibration offsets on the reported poses for
/// Cali/L5Ca (reported = true pose composed with the offset transform).
/// Clouds stay in their camera frames and carry labels when the mesh has them.
/// Throws GeometryError if a vertex falls outside either view.
Capture two_view_capture(const TriangleMesh& mesh, const RigConfig& rig, ErrorCondition condition,
                         const NoiseModel& noise, std::uint64_t seed);

/// Both views moved to the world frame with their reported poses and merged.
LabeledPointCloud merged_cloud(const Capture& capture);

}  // namespace bsv
