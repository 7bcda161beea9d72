#include "bsv/scan.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>

#include "bsv/cloud_ops.hpp"
#include "bsv/error.hpp"
#include "bsv/raycast.hpp"

namespace bsv {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Uniform in (0, 1].
double unit_uniform(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

double deg2rad(double d) { return d * std::numbers::pi / 180.0; }

}  // namespace

void Intrinsics::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) throw InvalidArgument("intrinsics: focal lengths must be positive");
  if (width <= 0 || height <= 0) throw InvalidArgument("intrinsics: empty image");
  if (!(cx >= 0.0 && cx <= width - 1) || !(cy >= 0.0 && cy <= height - 1)) {
    throw InvalidArgument("intrinsics: principal point outside the image");
  }
}

Vec3 VirtualCamera::ray(double u, double v) const {
  return {(u - intrinsics.cx) / intrinsics.fx, (v - intrinsics.cy) / intrinsics.fy, 1.0};
}

std::optional<Eigen::Vector2d> VirtualCamera::project(const Vec3& world) const {
  const Vec3 c = pose.inverse().apply(world);
  if (c.z() <= 0.0) return std::nullopt;
  return Eigen::Vector2d(intrinsics.fx * c.x() / c.z() + intrinsics.cx,
                         intrinsics.fy * c.y() / c.z() + intrinsics.cy);
}

std::string_view condition_name(ErrorCondition c) {
  switch (c) {
    case ErrorCondition::NoEr:
      return "NoEr";
    case ErrorCondition::Cali:
      return "Cali";
    case ErrorCondition::L515:
      return "L515";
    case ErrorCondition::L5Ca:
      return "L5Ca";
  }
  return "?";
}

std::optional<ErrorCondition> parse_condition(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  if (lower == "noer") return ErrorCondition::NoEr;
  if (lower == "cali") return ErrorCondition::Cali;
  if (lower == "l515") return ErrorCondition::L515;
  if (lower == "l5ca") return ErrorCondition::L5Ca;
  return std::nullopt;
}

bool has_depth_noise(ErrorCondition c) {
  return c == ErrorCondition::L515 || c == ErrorCondition::L5Ca;
}

bool has_calibration_error(ErrorCondition c) {
  return c == ErrorCondition::Cali || c == ErrorCondition::L5Ca;
}

CalibrationOffset default_front_offset() {
  return {Vec3(0.22, 0.53, -7.01), Vec3(0.88, 0.68, 0.47)};
}

CalibrationOffset default_back_offset() {
  return {Vec3(-0.17, -0.13, -5.84), Vec3(0.24, 0.46, 1.05)};
}

RigidTransform calibration_transform(const CalibrationOffset& offset) {
  // body axes (vertical, transversal, longitudinal) -> camera (y, x, z)
  const Vec3 t_cm(offset.translation_cm.y(), offset.translation_cm.x(), offset.translation_cm.z());
  const Mat3 r = (Eigen::AngleAxisd(deg2rad(offset.rotation_deg.x()), Vec3::UnitY()) *
                  Eigen::AngleAxisd(deg2rad(offset.rotation_deg.y()), Vec3::UnitX()) *
                  Eigen::AngleAxisd(deg2rad(offset.rotation_deg.z()), Vec3::UnitZ()))
                     .toRotationMatrix();
  RigidTransform e;
  e.rotation = r;
  e.translation = t_cm / 100.0;
  return e;
}

void NoiseModel::validate() const {
  if (!(depth_sigma_at_1m >= 0.0)) throw InvalidArgument("noise: depth sigma must be >= 0");
  for (const auto* j : {&front_jitter, &back_jitter}) {
    if ((j->translation_cm.array() < 0.0).any() || (j->rotation_deg.array() < 0.0).any()) {
      throw InvalidArgument("noise: calibration jitter must be >= 0");
    }
  }
}

VirtualCamera front_camera(const RigConfig& rig) {
  VirtualCamera cam;
  cam.intrinsics = rig.intrinsics;
  cam.pose.rotation = Vec3(1.0, -1.0, -1.0).asDiagonal();
  cam.pose.translation = Vec3(0.0, rig.camera_height, 0.5 * rig.separation);
  return cam;
}

VirtualCamera back_camera(const RigConfig& rig) {
  VirtualCamera cam;
  cam.intrinsics = rig.intrinsics;
  cam.pose.rotation = Vec3(-1.0, -1.0, 1.0).asDiagonal();
  cam.pose.translation = Vec3(0.0, rig.camera_height, -0.5 * rig.separation);
  return cam;
}

RenderResult render(const TriangleMesh& mesh, const VirtualCamera& camera) {
  const auto& in = camera.intrinsics;
  in.validate();
  camera.pose.validate();
  const Vec3 origin = camera.pose.translation;
  if (!mesh.empty() && std::abs(winding_number(mesh, origin)) > 0.5) {
    throw GeometryError("render: camera center lies inside the mesh");
  }
  RenderResult out{DepthImage(in.width, in.height, 0.0), Image<int>(in.width, in.height, -1)};
  if (mesh.empty()) return out;
  const TriangleBvh bvh(mesh);
  for (int v = 0; v < in.height; ++v) {
    for (int u = 0; u < in.width; ++u) {
      const Vec3 d = camera.pose.rotation * camera.ray(u, v);
      const auto hit = bvh.intersect(origin, d);
      if (!hit) continue;
      // d has unit camera-z component, so t is the depth.
      out.depth.at(u, v) = hit->t;
      out.face.at(u, v) = hit->face;
    }
  }
  return out;
}

DepthImage render_depth(const TriangleMesh& mesh, const VirtualCamera& camera) {
  return render(mesh, camera).depth;
}

namespace {

void check_size(int w, int h, const Intrinsics& in, const char* what) {
  if (w != in.width || h != in.height) {
    throw InvalidArgument(std::string("deproject: ") + what + " is " + std::to_string(w) + "x" +
                          std::to_string(h) + ", camera expects " + std::to_string(in.width) +
                          "x" + std::to_string(in.height));
  }
}

}  // namespace

LabeledPointCloud deproject(const DepthImage& depth, const VirtualCamera& camera) {
  check_size(depth.width, depth.height, camera.intrinsics, "depth image");
  LabeledPointCloud cloud;
  for (int v = 0; v < depth.height; ++v) {
    for (int u = 0; u < depth.width; ++u) {
      const double z = depth.at(u, v);
      if (z == 0.0) continue;
      cloud.points.push_back(camera.pose.apply(camera.ray(u, v) * z));
    }
  }
  return cloud;
}

LabeledPointCloud deproject(const DepthImage& depth, const VirtualCamera& camera,
                            const ByteImage& labels) {
  check_size(depth.width, depth.height, camera.intrinsics, "depth image");
  check_size(labels.width, labels.height, camera.intrinsics, "label mask");
  LabeledPointCloud cloud;
  for (int v = 0; v < depth.height; ++v) {
    for (int u = 0; u < depth.width; ++u) {
      const double z = depth.at(u, v);
      const auto label = label_from_ordinal(labels.at(u, v));
      if (!label) throw InvalidArgument("deproject: label value out of range");
      if (z == 0.0 || *label == SegmentLabel::Background) continue;
      cloud.points.push_back(camera.pose.apply(camera.ray(u, v) * z));
      cloud.labels.push_back(*label);
    }
  }
  return cloud;
}

double gaussian_sample(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  const std::uint64_t key = splitmix64(splitmix64(seed) ^ (stream * 0xD1B54A32D192ED03ULL));
  const double u1 = unit_uniform(splitmix64(key ^ (2 * index)));
  const double u2 = unit_uniform(splitmix64(key ^ (2 * index + 1)));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

DepthImage add_depth_noise(const DepthImage& depth, double sigma_at_1m, std::uint64_t seed,
                           std::uint64_t stream) {
  if (!(sigma_at_1m >= 0.0)) throw InvalidArgument("add_depth_noise: sigma must be >= 0");
  DepthImage out = depth;
  for (std::size_t i = 0; i < out.pixels.size(); ++i) {
    double& z = out.pixels[i];
    if (z == 0.0) continue;
    z += sigma_at_1m * z * gaussian_sample(seed, stream, i);
    if (z <= 0.0) z = 0.0;  // a return behind the sensor is a dropout
  }
  return out;
}

ByteImage face_label_mask(const TriangleMesh& mesh, const Image<int>& faces) {
  if (!mesh.has_labels()) throw InvalidArgument("face_label_mask: mesh has no labels");
  ByteImage mask(faces.width, faces.height, ordinal(SegmentLabel::Background));
  for (std::size_t i = 0; i < faces.pixels.size(); ++i) {
    const int f = faces.pixels[i];
    if (f >= 0) mask.pixels[i] = ordinal(mesh.face_label(static_cast<std::size_t>(f)));
  }
  return mask;
}

namespace {

CalibrationOffset jittered(const CalibrationOffset& mean, const CalibrationOffset& jitter,
                           std::uint64_t seed, std::uint64_t stream) {
  CalibrationOffset out = mean;
  for (int a = 0; a < 3; ++a) {
    out.translation_cm[a] += jitter.translation_cm[a] * gaussian_sample(seed, stream, a);
    out.rotation_deg[a] += jitter.rotation_deg[a] * gaussian_sample(seed, stream, 3 + a);
  }
  return out;
}

void check_in_view(const TriangleMesh& mesh, const VirtualCamera& cam, const char* name) {
  const auto& in = cam.intrinsics;
  for (const auto& p : mesh.vertices()) {
    const auto px = cam.project(p);
    if (!px || px->x() < 0.0 || px->y() < 0.0 || px->x() > in.width - 1 || px->y() > in.height - 1) {
      throw GeometryError(std::string("two_view_capture: mesh extends outside the ") + name +
                          " camera view");
    }
  }
}

CapturedView capture_view(const TriangleMesh& mesh, const VirtualCamera& cam,
                          const CalibrationOffset& offset, bool calibration, bool noise,
                          double sigma, std::uint64_t seed, std::uint64_t stream) {
  CapturedView view;
  view.camera = cam;
  auto rendered = render(mesh, cam);
  view.face = std::move(rendered.face);
  view.depth = noise ? add_depth_noise(rendered.depth, sigma, seed, stream) : rendered.depth;
  view.reported_pose = calibration ? cam.pose.compose(calibration_transform(offset)) : cam.pose;
  VirtualCamera local = cam;
  local.pose = RigidTransform::identity();
  if (mesh.has_labels()) {
    view.labels = face_label_mask(mesh, view.face);
    view.cloud = deproject(view.depth, local, view.labels);
  } else {
    view.cloud = deproject(view.depth, local);
  }
  return view;
}

}  // namespace

Capture two_view_capture(const TriangleMesh& mesh, const RigConfig& rig, ErrorCondition condition,
                         const NoiseModel& noise, std::uint64_t seed) {
  noise.validate();
  if (!(rig.separation > 0.0)) throw InvalidArgument("two_view_capture: separation must be > 0");
  const VirtualCamera front = front_camera(rig);
  const VirtualCamera back = back_camera(rig);
  check_in_view(mesh, front, "front");
  check_in_view(mesh, back, "back");
  const bool cal = has_calibration_error(condition);
  const bool dn = has_depth_noise(condition);
  // Streams 0/1 are depth noise, 2/3 the calibration jitter.
  const auto front_offset = jittered(noise.front_offset, noise.front_jitter, seed, 2);
  const auto back_offset = jittered(noise.back_offset, noise.back_jitter, seed, 3);
  Capture c;
  c.front = capture_view(mesh, front, front_offset, cal, dn, noise.depth_sigma_at_1m, seed, 0);
  c.back = capture_view(mesh, back, back_offset, cal, dn, noise.depth_sigma_at_1m, seed, 1);
  return c;
}

LabeledPointCloud merged_cloud(const Capture& capture) {
  return merge(capture.front.cloud, capture.back.cloud, capture.front.reported_pose,
               capture.back.reported_pose);
}

}  // namespace bsv
