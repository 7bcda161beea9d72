#include "bsv/segmentation.hpp"

#include <algorithm>
#include <fstream>

#include "bsv/error.hpp"
#include "bsv/spatial_index.hpp"
#include "bsv/topology.hpp"
#include "json.hpp"

namespace bsv {

using L = SegmentLabel;

PartMapping default_part_mapping() {
  return {
      {static_cast<int>(RawPart::LeftFace), L::Head},
      {static_cast<int>(RawPart::RightFace), L::Head},
      {static_cast<int>(RawPart::LeftUpperArmFront), L::LeftArm},
      {static_cast<int>(RawPart::LeftUpperArmBack), L::LeftArm},
      {static_cast<int>(RawPart::RightUpperArmFront), L::RightArm},
      {static_cast<int>(RawPart::RightUpperArmBack), L::RightArm},
      {static_cast<int>(RawPart::LeftLowerArmFront), L::LeftForearm},
      {static_cast<int>(RawPart::LeftLowerArmBack), L::LeftForearm},
      {static_cast<int>(RawPart::RightLowerArmFront), L::RightForearm},
      {static_cast<int>(RawPart::RightLowerArmBack), L::RightForearm},
      {static_cast<int>(RawPart::LeftHand), L::LeftHand},
      {static_cast<int>(RawPart::RightHand), L::RightHand},
      {static_cast<int>(RawPart::TorsoFront), L::Torso},
      {static_cast<int>(RawPart::TorsoBack), L::Torso},
      {static_cast<int>(RawPart::LeftUpperLegFront), L::LeftThigh},
      {static_cast<int>(RawPart::LeftUpperLegBack), L::LeftThigh},
      {static_cast<int>(RawPart::RightUpperLegFront), L::RightThigh},
      {static_cast<int>(RawPart::RightUpperLegBack), L::RightThigh},
      {static_cast<int>(RawPart::LeftLowerLegFront), L::LeftShin},
      {static_cast<int>(RawPart::LeftLowerLegBack), L::LeftShin},
      {static_cast<int>(RawPart::RightLowerLegFront), L::RightShin},
      {static_cast<int>(RawPart::RightLowerLegBack), L::RightShin},
      {static_cast<int>(RawPart::LeftFoot), L::LeftFoot},
      {static_cast<int>(RawPart::RightFoot), L::RightFoot},
      {kRawBackground, L::Background},
  };
}

RawPart raw_part_for(SegmentLabel label, bool seen_from_front, bool subject_left) {
  const auto front_back = [&](RawPart front) {
    return static_cast<RawPart>(static_cast<int>(front) + (seen_from_front ? 0 : 1));
  };
  switch (label) {
    case L::Head:
      return subject_left ? RawPart::LeftFace : RawPart::RightFace;
    case L::Torso:
      return front_back(RawPart::TorsoFront);
    case L::LeftArm:
      return front_back(RawPart::LeftUpperArmFront);
    case L::RightArm:
      return front_back(RawPart::RightUpperArmFront);
    case L::LeftForearm:
      return front_back(RawPart::LeftLowerArmFront);
    case L::RightForearm:
      return front_back(RawPart::RightLowerArmFront);
    case L::LeftHand:
      return RawPart::LeftHand;
    case L::RightHand:
      return RawPart::RightHand;
    case L::LeftThigh:
      return front_back(RawPart::LeftUpperLegFront);
    case L::RightThigh:
      return front_back(RawPart::RightUpperLegFront);
    case L::LeftShin:
      return front_back(RawPart::LeftLowerLegFront);
    case L::RightShin:
      return front_back(RawPart::RightLowerLegFront);
    case L::LeftFoot:
      return RawPart::LeftFoot;
    case L::RightFoot:
      return RawPart::RightFoot;
    case L::Background:
      break;
  }
  throw InvalidArgument("raw_part_for: background has no raw part");
}

ByteImage regroup_24_to_14(const ByteImage& raw, const PartMapping& mapping) {
  std::array<int, 256> table;
  table.fill(-1);
  for (const auto& [value, label] : mapping) {
    if (value < 0 || value > 255) throw InvalidArgument("regroup: mapping key out of byte range");
    table[static_cast<std::size_t>(value)] = ordinal(label);
  }
  ByteImage out(raw.width, raw.height);
  for (std::size_t i = 0; i < raw.pixels.size(); ++i) {
    const int mapped = table[raw.pixels[i]];
    if (mapped < 0) {
      throw InvalidArgument("regroup: raw value " + std::to_string(raw.pixels[i]) + " is not mapped");
    }
    out.pixels[i] = static_cast<std::uint8_t>(mapped);
  }
  return out;
}

LandmarkSet read_landmarks(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
  if (!j.is_object()) throw IoError(path.string() + ": landmarks must be a JSON object");
  LandmarkSet set;
  for (const auto& [name, v] : j.items()) {
    try {
      set[name] = Landmark{v.at("x").get<double>(), v.at("y").get<double>(),
                           v.at("confidence").get<double>()};
    } catch (const nlohmann::json::exception& e) {
      throw IoError(path.string() + ": landmark '" + name + "': " + e.what());
    }
    if (set[name].confidence < 0.0 || set[name].confidence > 1.0) {
      throw IoError(path.string() + ": landmark '" + name + "' confidence outside [0,1]");
    }
  }
  return set;
}

void write_landmarks(const std::filesystem::path& path, const LandmarkSet& landmarks) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [name, lm] : landmarks) {
    j[name] = {{"x", lm.x}, {"y", lm.y}, {"confidence", lm.confidence}};
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

double BodyLines::medial_side(double u, double v) const {
  return up.x() * (v - mid_hip.y()) - up.y() * (u - mid_hip.x());
}

double BodyLines::transverse_side(double u, double v) const {
  return up.x() * (u - mid_hip.x()) + up.y() * (v - mid_hip.y());
}

BodyLines body_lines(const LandmarkSet& landmarks, double min_confidence) {
  for (const auto& name : kRequiredLandmarks) {
    auto it = landmarks.find(name);
    if (it == landmarks.end()) throw InvalidArgument("landmark '" + name + "' is missing");
    if (it->second.confidence < min_confidence) {
      throw InvalidArgument("landmark '" + name + "' confidence " +
                            std::to_string(it->second.confidence) + " is below " +
                            std::to_string(min_confidence));
    }
  }
  const auto pt = [&](const std::string& n) {
    const auto& l = landmarks.at(n);
    return Eigen::Vector2d(l.x, l.y);
  };
  BodyLines lines;
  lines.mid_hip = 0.5 * (pt("left_hip") + pt("right_hip"));
  const Eigen::Vector2d mid_shoulder = 0.5 * (pt("left_shoulder") + pt("right_shoulder"));
  const Eigen::Vector2d up = mid_shoulder - lines.mid_hip;
  if (!(up.norm() > 0.0)) throw InvalidArgument("landmarks: shoulders and hips coincide");
  lines.up = up.normalized();
  return lines;
}

ByteImage relabel_by_body_lines(const ByteImage& mask, const LandmarkSet& landmarks, View view,
                                double min_confidence) {
  const BodyLines lines = body_lines(landmarks, min_confidence);
  ByteImage out = mask;
  for (int v = 0; v < mask.height; ++v) {
    for (int u = 0; u < mask.width; ++u) {
      const auto label = label_from_ordinal(mask.at(u, v));
      if (!label) throw InvalidArgument("relabel: mask value out of range");
      if (!is_limb(*label)) continue;
      const bool image_right = lines.medial_side(u, v) > 0.0;
      const bool subject_left = view == View::Front ? image_right : !image_right;
      const auto family = lines.transverse_side(u, v) > 0.0 ? LimbFamily::Arm : LimbFamily::Leg;
      out.at(u, v) = ordinal(make_limb_label(family, subject_left ? BodySide::Left : BodySide::Right,
                                             limb_level(*label)));
    }
  }
  return out;
}

LabeledPointCloud project_labels_to_cloud(const ByteImage& mask, const DepthImage& depth,
                                          const VirtualCamera& camera) {
  if (mask.width != depth.width || mask.height != depth.height) {
    throw InvalidArgument("project_labels_to_cloud: mask and depth sizes differ");
  }
  return deproject(depth, camera, mask);
}

TriangleMesh propagate_labels_to_mesh(const TriangleMesh& mesh, const LabeledPointCloud& cloud) {
  if (cloud.empty()) throw InvalidArgument("propagate_labels_to_mesh: empty cloud");
  if (!cloud.has_labels()) throw InvalidArgument("propagate_labels_to_mesh: cloud has no labels");
  const SpatialIndex index(cloud.points);
  std::vector<SegmentLabel> labels;
  labels.reserve(mesh.vertex_count());
  for (const auto& p : mesh.vertices()) labels.push_back(cloud.labels[index.nearest(p)]);
  return mesh.with_labels(std::move(labels));
}

std::map<std::string, Vec3> joints_from_labels(const TriangleMesh& mesh) {
  if (!mesh.has_labels()) throw InvalidArgument("joints_from_labels: mesh has no labels");
  using L = SegmentLabel;
  struct Pair {
    const char* name;
    L a, b;
  };
  static constexpr Pair kPairs[] = {
      {"left_shoulder", L::Torso, L::LeftArm},      {"right_shoulder", L::Torso, L::RightArm},
      {"left_elbow", L::LeftArm, L::LeftForearm},   {"right_elbow", L::RightArm, L::RightForearm},
      {"left_wrist", L::LeftForearm, L::LeftHand},  {"right_wrist", L::RightForearm, L::RightHand},
      {"left_hip", L::Torso, L::LeftThigh},         {"right_hip", L::Torso, L::RightThigh},
      {"left_knee", L::LeftThigh, L::LeftShin},     {"right_knee", L::RightThigh, L::RightShin},
      {"left_ankle", L::LeftShin, L::LeftFoot},     {"right_ankle", L::RightShin, L::RightFoot},
  };
  const auto& labels = mesh.labels();
  std::map<std::string, Vec3> joints;
  for (const auto& pair : kPairs) {
    std::vector<char> on_boundary(mesh.vertex_count(), 0);
    for (const auto& f : mesh.faces()) {
      for (int e = 0; e < 3; ++e) {
        const int i = f[e];
        const int j = f[(e + 1) % 3];
        const L li = labels[static_cast<std::size_t>(i)];
        const L lj = labels[static_cast<std::size_t>(j)];
        if ((li == pair.a && lj == pair.b) || (li == pair.b && lj == pair.a)) {
          on_boundary[static_cast<std::size_t>(i)] = 1;
          on_boundary[static_cast<std::size_t>(j)] = 1;
        }
      }
    }
    Vec3 sum = Vec3::Zero();
    int count = 0;
    for (std::size_t v = 0; v < on_boundary.size(); ++v) {
      if (on_boundary[v]) {
        sum += mesh.vertices()[v];
        ++count;
      }
    }
    if (count == 0) {
      throw GeometryError(std::string("joints_from_labels: no ") + std::string(label_name(pair.a)) +
                          "/" + std::string(label_name(pair.b)) + " boundary for " + pair.name);
    }
    joints[pair.name] = sum / count;
  }
  return joints;
}

TriangleMesh extract_segments(const TriangleMesh& mesh, const std::vector<SegmentLabel>& labels,
                              std::vector<std::string>* warnings) {
  if (!mesh.has_labels()) throw InvalidArgument("extract_segment: mesh has no labels");
  std::vector<int> faces;
  for (std::size_t f = 0; f < mesh.face_count(); ++f) {
    if (std::find(labels.begin(), labels.end(), mesh.face_label(f)) != labels.end()) {
      faces.push_back(static_cast<int>(f));
    }
  }
  if (faces.empty()) {
    std::string names;
    for (auto l : labels) names += (names.empty() ? "" : ", ") + std::string(label_name(l));
    throw GeometryError("segment " + names + " is absent from the mesh");
  }
  return fill_holes(submesh(mesh, faces), warnings);
}

TriangleMesh extract_segment(const TriangleMesh& mesh, SegmentLabel label,
                             std::vector<std::string>* warnings) {
  return extract_segments(mesh, {label}, warnings);
}

}  // namespace bsv
