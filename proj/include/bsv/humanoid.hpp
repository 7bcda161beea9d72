#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "bsv/image.hpp"
#include "bsv/mesh.hpp"
#include "bsv/scan.hpp"
#include "bsv/segmentation.hpp"

namespace bsv {

/// Shape parameters of the procedural humanoid. Lengths are in metres for
/// a unit `scale`; the body stands on y = 0, faces +z, and its left side is
/// at +x. Arms hang in an A-pose.
struct HumanoidParams {
  double scale = 1.0;            // uniform size factor
  double girth = 1.0;            // trunk and limb radius factor
  double arm_angle_deg = 50.0;   // arm angle from the vertical
  double leg_spread = 0.11;      // half distance between the hip joints
  bool extremities = true;       // head, hands and feet
  double grid_step = 0.02;       // sampling step of the surface extraction
  int relax_iterations = 6;      // tangential smoothing passes

  void validate() const;
};

/// Template body: default proportions on a coarser grid.
HumanoidParams template_humanoid_params();
/// The bundled evaluation subject (proportions differ from the template).
HumanoidParams bundled_subject_params();
/// Random proportions around the defaults (scale 0.92-1.08, girth 0.9-1.15,
/// arm angle 48-55 degrees).
HumanoidParams sampled_subject_params(std::uint64_t seed);

struct Humanoid {
  TriangleMesh mesh;                    // watertight, labeled, outward oriented
  std::map<std::string, Vec3> joints;   // the landmark names of kRequiredLandmarks
};

/// Smooth union of tapered capsules and ellipsoids, extracted with marching
/// tetrahedra, projected back onto the implicit surface and relaxed. Vertex
/// labels come from the nearest body part; thigh vertices above the hip
/// joints are Torso.
Humanoid make_humanoid(const HumanoidParams& params);

/// Registration template: the body of `params` with head, hands and feet cut
/// off at their label boundaries and the cuts closed by fill_holes, so its
/// ends match a cloud from which the extremities were dropped.
TriangleMesh make_humanoid_template(const HumanoidParams& params = template_humanoid_params());

/// Signed distance-like field of the body (negative inside).
double humanoid_field(const HumanoidParams& params, const Vec3& p);

/// Errors injected into the synthetic detector output.
struct DetectionErrors {
  bool swap_sides_in_back = true;   // left/right limb parts swapped in the back view
  double family_confusion = 0.1;    // fraction of forearm pixels reported as lower leg
  double landmark_confidence = 0.9;
  std::uint64_t seed = 0;
};

struct SyntheticDetections {
  ByteImage raw;            // 24-part mask, 255 = background
  LandmarkSet landmarks;    // pixel positions of the joints
};

/// Fakes the 24-part segmentation and the pose keypoints of one view from
/// the ideal label image of a capture and the generator joints.
SyntheticDetections synthesize_detections(const CapturedView& view,
                                          const std::map<std::string, Vec3>& joints,
                                          View which, const DetectionErrors& errors);

}  // namespace bsv
