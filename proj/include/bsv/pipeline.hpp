#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bsv/align.hpp"
#include "bsv/arap.hpp"
#include "bsv/cloud_ops.hpp"
#include "bsv/config.hpp"
#include "bsv/humanoid.hpp"
#include "bsv/metrics.hpp"
#include "bsv/scan.hpp"
#include "bsv/segmentation.hpp"

namespace bsv {

inline constexpr std::string_view kConfigSchema = "bsv.config/1";

/// Everything a run needs. Loaded from a ConfigFile; relative paths are
/// resolved against the config file's directory.
struct PipelineConfig {
  std::filesystem::path template_mesh;  // [paths] template
  std::filesystem::path ground_truth;   // [paths] ground_truth
  std::filesystem::path output_dir = "bsv_out";
  std::string subject;                  // defaults to the ground-truth file stem

  RigConfig rig;
  ErrorCondition condition = ErrorCondition::NoEr;
  NoiseModel noise;
  std::optional<std::uint64_t> seed;

  bool clean = true;
  OutlierRemovalParams cleaning;
  RegistrationConfig registration;
  DetectionErrors detection;
  std::optional<double> real_mass;  // kg

  // cmd_evaluate
  std::vector<std::filesystem::path> subjects;
  std::vector<ErrorCondition> conditions = {ErrorCondition::NoEr, ErrorCondition::Cali,
                                            ErrorCondition::L515, ErrorCondition::L5Ca};
  int seeds = 1;

  /// Throws IoError for malformed values or referenced files that do not exist.
  static PipelineConfig from_config(const ConfigFile& file,
                                    const std::filesystem::path& base_dir = {});
  static PipelineConfig load(const std::filesystem::path& path);
  ConfigFile to_config() const;

  /// Throws InvalidArgument for out-of-range parameters.
  void validate() const;
  std::string subject_name() const;
};

/// seed + k + FNV-1a(subject "/" condition name), stable across platforms.
std::uint64_t run_seed(std::uint64_t seed, std::string_view subject, ErrorCondition condition,
                       int k = 0);

/// One camera's sensor output as consumed by the registration stage.
struct ViewInput {
  View view = View::Front;
  DepthImage depth;
  Intrinsics intrinsics;
  RigidTransform reported_pose;
  std::optional<ByteImage> raw_mask;     // 24-part mask
  std::optional<LandmarkSet> landmarks;
};

struct Simulation {
  Capture capture;
  ViewInput front;
  ViewInput back;
};

/// Renders both views for the configured condition; for a labeled mesh also
/// fakes the 24-part masks and keypoints (joints from the label boundaries).
Simulation simulate(const TriangleMesh& ground_truth, const PipelineConfig& config,
                    std::uint64_t seed);

/// <dir>/{front,back}_{depth.bsvd,pose.txt,true_pose.txt,cloud.ply[,mask.bsvm,landmarks.json]}.
/// pose.txt is the reported (possibly miscalibrated) transform.
void write_simulation(const std::filesystem::path& dir, const Simulation& sim);
ViewInput read_view(const std::filesystem::path& dir, View view);

/// World-frame cloud of a view: masks regrouped and relabelled when present,
/// then cleaned if configured.
LabeledPointCloud view_cloud(const ViewInput& input, const PipelineConfig& config,
                             std::vector<std::string>* warnings = nullptr);

struct Registration {
  LabeledPointCloud front;   // world frame, cleaned
  LabeledPointCloud back;
  LabeledPointCloud merged;
  LabeledPointCloud body;    // extremities dropped (labeled input only)
  TriangleMesh aligned_template;  // world frame
  AlignmentParams alignment;
  RegistrationResult result;
  TriangleMesh fitted;       // world frame, labels from the cloud when available
};

/// clean -> merge -> drop extremities -> align -> register -> label.
Registration register_views(const TriangleMesh& tmpl, const ViewInput& front,
                            const ViewInput& back, const PipelineConfig& config,
                            std::vector<std::string>* warnings = nullptr);

/// merged.ply, body.ply, aligned_template.ply, fitted.ply, energy.csv
void write_registration(const std::filesystem::path& dir, const Registration& reg);

/// Whole-body and per-segment volumes of a fitted mesh. With a labeled
/// ground truth, its whole body is the union of the evaluated segments;
/// unlabeled meshes compare whole volumes only. A segment that cannot be
/// extracted becomes a failure entry.
VolumeReport measure_volumes(const TriangleMesh& fitted, const TriangleMesh* ground_truth,
                             const std::string& subject, ErrorCondition condition,
                             std::uint64_t seed, std::optional<double> real_mass = std::nullopt);

/// Benchmark boxes as (width, height, depth) in meters.
inline const Vec3 kBox1Size{0.52, 0.558, 0.589};
inline const Vec3 kBox2Size{0.208, 1.038, 0.204};

/// Closed box standing on the floor (y = 0), turned `yaw_deg` about the
/// vertical so both cameras see two side faces.
TriangleMesh make_box_subject(const Vec3& size, double yaw_deg = 45.0, int divisions = 10);
/// Unit cube with `divisions` quads per edge and the same yaw, for box runs.
TriangleMesh make_box_template(int divisions = 16, double yaw_deg = 45.0);

/// simulate -> register -> measure, in memory.
VolumeReport run_end_to_end(const TriangleMesh& ground_truth, const TriangleMesh& tmpl,
                            const PipelineConfig& config, std::uint64_t seed,
                            Registration* registration = nullptr);

}  // namespace bsv
