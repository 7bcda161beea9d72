#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bsv/image.hpp"
#include "bsv/labels.hpp"
#include "bsv/mesh.hpp"
#include "bsv/point_cloud.hpp"
#include "bsv/scan.hpp"

namespace bsv {

/// Raw 24-part ids of the person-segmentation network (BodyPix order).
enum class RawPart : std::uint8_t {
  LeftFace = 0,
  RightFace,
  LeftUpperArmFront,
  LeftUpperArmBack,
  RightUpperArmFront,
  RightUpperArmBack,
  LeftLowerArmFront,
  LeftLowerArmBack,
  RightLowerArmFront,
  RightLowerArmBack,
  LeftHand,
  RightHand,
  TorsoFront,
  TorsoBack,
  LeftUpperLegFront,
  LeftUpperLegBack,
  RightUpperLegFront,
  RightUpperLegBack,
  LeftLowerLegFront,
  LeftLowerLegBack,
  RightLowerLegFront,
  RightLowerLegBack,
  LeftFoot,
  RightFoot,
};

inline constexpr int kRawPartCount = 24;
inline constexpr std::uint8_t kRawBackground = 255;

/// Raw value -> segment label. Must cover every value present in a mask.
using PartMapping = std::map<int, SegmentLabel>;

/// The 24 parts folded into the 14 segments (front/back halves merged,
/// faces into Head), plus 255 -> Background.
PartMapping default_part_mapping();

/// Raw part of a 14-segment label for a pixel seen from the front or the
/// back; Head splits into left/right face by `subject_left`.
RawPart raw_part_for(SegmentLabel label, bool seen_from_front, bool subject_left);

/// Applies the mapping pixel by pixel. Throws InvalidArgument naming the
/// first unmapped value.
ByteImage regroup_24_to_14(const ByteImage& raw, const PartMapping& mapping);

struct Landmark {
  double x = 0.0;  // pixels
  double y = 0.0;
  double confidence = 0.0;
};

/// Named image keypoints (subject-anatomical names, e.g. "left_shoulder").
using LandmarkSet = std::map<std::string, Landmark>;

/// Keypoints the relabelling needs.
inline const std::array<std::string, 12> kRequiredLandmarks = {
    "left_shoulder", "right_shoulder", "left_elbow", "right_elbow", "left_wrist", "right_wrist",
    "left_hip",      "right_hip",      "left_knee",  "right_knee",  "left_ankle", "right_ankle"};

inline constexpr double kLandmarkConfidence = 0.75;

enum class View { Front, Back };

/// JSON object {"name": {"x": .., "y": .., "confidence": ..}, ...}.
LandmarkSet read_landmarks(const std::filesystem::path& path);
void write_landmarks(const std::filesystem::path& path, const LandmarkSet& landmarks);

/// Body axes in the image: the medial line runs from the mid-hip point to
/// the mid-shoulder point, the transverse line is its perpendicular through
/// the mid-hip point.
struct BodyLines {
  Eigen::Vector2d mid_hip;
  Eigen::Vector2d up;  // unit, towards the shoulders

  /// > 0 on the image-right side of the medial line.
  double medial_side(double u, double v) const;
  /// > 0 on the shoulder side of the transverse line.
  double transverse_side(double u, double v) const;
};

/// Throws InvalidArgument naming a required landmark that is missing or has
/// confidence below `min_confidence`.
BodyLines body_lines(const LandmarkSet& landmarks, double min_confidence = kLandmarkConfidence);

/// Re-labels every limb pixel from its position: body side from the medial
/// line (subject-left is image-right in the front view, image-left in the
/// back view), arm/leg family from the transverse line (above: arm, below:
/// leg). The limb level (upper, lower, hand/foot) is kept; Head, Torso and
/// Background pixels are untouched. Idempotent.
ByteImage relabel_by_body_lines(const ByteImage& mask, const LandmarkSet& landmarks, View view,
                                double min_confidence = kLandmarkConfidence);

/// Deprojects the depth image keeping the mask label of each pixel;
/// background pixels give no point.
LabeledPointCloud project_labels_to_cloud(const ByteImage& mask, const DepthImage& depth,
                                          const VirtualCamera& camera);

/// Each vertex takes the label of its nearest cloud point (lowest index on
/// ties). Throws InvalidArgument for an empty or unlabeled cloud.
TriangleMesh propagate_labels_to_mesh(const TriangleMesh& mesh, const LabeledPointCloud& cloud);

/// Joint positions of a labeled body mesh, each the centroid of the vertices
/// on the boundary between two adjacent segments (shoulder: torso/arm,
/// elbow: arm/forearm, wrist: forearm/hand, hip: torso/thigh, knee:
/// thigh/shin, ankle: shin/foot). Keys are the kRequiredLandmarks names.
/// Throws GeometryError when a boundary is missing.
std::map<std::string, Vec3> joints_from_labels(const TriangleMesh& mesh);

/// Faces whose majority label is in `labels`, closed with fill_holes.
/// Throws GeometryError when no face qualifies.
TriangleMesh extract_segments(const TriangleMesh& mesh, const std::vector<SegmentLabel>& labels,
                              std::vector<std::string>* warnings = nullptr);
TriangleMesh extract_segment(const TriangleMesh& mesh, SegmentLabel label,
                             std::vector<std::string>* warnings = nullptr);

}  // namespace bsv
