#include "bsv/pipeline.hpp"

#include <charconv>
#include <numbers>
#include <sstream>

#include "bsv/error.hpp"
#include "bsv/io.hpp"
#include "bsv/measures.hpp"
#include "bsv/primitives.hpp"

namespace bsv {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    const auto e = item.find_last_not_of(" \t");
    out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

Vec3 parse_vec3(const ConfigFile& file, const std::string& section, const std::string& key,
                const Vec3& fallback) {
  const auto v = file.get(section, key);
  if (!v) return fallback;
  const auto parts = split_list(*v);
  if (parts.size() != 3) {
    throw IoError(file.origin() + ": " + section + "." + key + " needs three comma-separated numbers");
  }
  Vec3 out;
  for (int i = 0; i < 3; ++i) {
    try {
      std::size_t used = 0;
      out[i] = std::stod(parts[static_cast<std::size_t>(i)], &used);
      if (used != parts[static_cast<std::size_t>(i)].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw IoError(file.origin() + ": " + section + "." + key + " has a non-numeric component");
    }
  }
  return out;
}

// shortest text that reads back to the same double
std::string format_double(double v) {
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::string format_vec3(const Vec3& v) {
  return format_double(v.x()) + ", " + format_double(v.y()) + ", " + format_double(v.z());
}


ErrorCondition parse_condition_or_throw(const std::string& text, const std::string& where) {
  const auto c = parse_condition(text);
  if (!c) throw IoError(where + ": unknown condition '" + text + "' (noer, cali, l515, l5ca)");
  return *c;
}

fs::path resolve(const fs::path& base, const std::string& value, const std::string& key) {
  fs::path p(value);
  if (p.is_relative() && !base.empty()) p = base / p;
  if (!fs::exists(p)) throw IoError(key + ": " + p.string() + " does not exist");
  return p;
}

TriangleMesh translated(const TriangleMesh& mesh, const Vec3& t) {
  return transformed(mesh, Mat3::Identity(), t);
}

fs::path view_file(const fs::path& dir, View view, const std::string& suffix) {
  return dir / ((view == View::Front ? "front_" : "back_") + suffix);
}

}  // namespace

PipelineConfig PipelineConfig::from_config(const ConfigFile& f, const fs::path& base_dir) {
  PipelineConfig c;
  if (auto schema = f.get("bsv", "schema"); schema && *schema != kConfigSchema) {
    throw IoError(f.origin() + ": unsupported config schema " + *schema);
  }
  if (auto v = f.get("paths", "template")) c.template_mesh = resolve(base_dir, *v, "paths.template");
  if (auto v = f.get("paths", "ground_truth")) {
    c.ground_truth = resolve(base_dir, *v, "paths.ground_truth");
  }
  if (auto v = f.get("paths", "output")) {
    c.output_dir = fs::path(*v).is_relative() && !base_dir.empty() ? base_dir / *v : fs::path(*v);
  }
  if (auto v = f.get("paths", "subjects")) {
    for (const auto& s : split_list(*v)) c.subjects.push_back(resolve(base_dir, s, "paths.subjects"));
  }

  if (auto v = f.get("run", "subject")) c.subject = *v;
  if (auto v = f.get_int("run", "seed")) {
    if (*v < 0) throw IoError(f.origin() + ": run.seed must be non-negative");
    c.seed = static_cast<std::uint64_t>(*v);
  }
  if (auto v = f.get("run", "condition")) c.condition = parse_condition_or_throw(*v, f.origin());
  if (auto v = f.get_double("run", "real_mass")) c.real_mass = *v;
  if (auto v = f.get_int("run", "seeds")) c.seeds = static_cast<int>(*v);
  if (auto v = f.get("run", "conditions")) {
    c.conditions.clear();
    for (const auto& s : split_list(*v)) c.conditions.push_back(parse_condition_or_throw(s, f.origin()));
  }

  if (auto v = f.get_double("rig", "separation")) c.rig.separation = *v;
  if (auto v = f.get_double("rig", "camera_height")) c.rig.camera_height = *v;
  if (auto v = f.get_double("rig", "fx")) c.rig.intrinsics.fx = *v;
  if (auto v = f.get_double("rig", "fy")) c.rig.intrinsics.fy = *v;
  if (auto v = f.get_double("rig", "cx")) c.rig.intrinsics.cx = *v;
  if (auto v = f.get_double("rig", "cy")) c.rig.intrinsics.cy = *v;
  if (auto v = f.get_int("rig", "width")) c.rig.intrinsics.width = static_cast<int>(*v);
  if (auto v = f.get_int("rig", "height")) c.rig.intrinsics.height = static_cast<int>(*v);

  if (auto v = f.get_double("noise", "depth_sigma_at_1m")) c.noise.depth_sigma_at_1m = *v;
  auto& n = c.noise;
  n.front_offset.translation_cm = parse_vec3(f, "noise", "front_translation_cm", n.front_offset.translation_cm);
  n.front_offset.rotation_deg = parse_vec3(f, "noise", "front_rotation_deg", n.front_offset.rotation_deg);
  n.back_offset.translation_cm = parse_vec3(f, "noise", "back_translation_cm", n.back_offset.translation_cm);
  n.back_offset.rotation_deg = parse_vec3(f, "noise", "back_rotation_deg", n.back_offset.rotation_deg);
  n.front_jitter.translation_cm = parse_vec3(f, "noise", "front_translation_jitter_cm", n.front_jitter.translation_cm);
  n.front_jitter.rotation_deg = parse_vec3(f, "noise", "front_rotation_jitter_deg", n.front_jitter.rotation_deg);
  n.back_jitter.translation_cm = parse_vec3(f, "noise", "back_translation_jitter_cm", n.back_jitter.translation_cm);
  n.back_jitter.rotation_deg = parse_vec3(f, "noise", "back_rotation_jitter_deg", n.back_jitter.rotation_deg);

  if (auto v = f.get_bool("cleaning", "enabled")) c.clean = *v;
  if (auto v = f.get_int("cleaning", "neighbors")) {
    if (*v <= 0) throw IoError(f.origin() + ": cleaning.neighbors must be positive");
    c.cleaning.neighbors = static_cast<std::size_t>(*v);
  }
  if (auto v = f.get_double("cleaning", "std_ratio")) c.cleaning.std_ratio = *v;

  auto& r = c.registration;
  if (auto v = f.get_double("registration", "per_cell_weight")) r.per_cell_weight = *v;
  if (auto v = f.get_double("registration", "alpha")) r.regularization_alpha = *v;
  if (auto v = f.get_double("registration", "correspondence_weight")) r.correspondence_weight = *v;
  if (auto v = f.get_int("registration", "inner_sweeps")) r.inner_sweeps = static_cast<int>(*v);
  if (auto v = f.get_double("registration", "max_correspondence_distance")) {
    r.max_correspondence_distance = *v;
  }
  if (auto v = f.get_bool("registration", "early_exit")) r.early_exit = *v;
  if (auto v = f.get_double("registration", "early_exit_tolerance")) r.early_exit_tolerance = *v;
  if (auto v = f.get_double("registration", "instability_distortion")) r.instability_distortion = *v;
  if (auto v = f.get("registration", "schedule")) {
    r.schedule.clear();
    for (const auto& item : split_list(*v)) {
      const auto colon = item.find(':');
      const auto dir = parse_direction(item.substr(0, colon));
      int iterations = 0;
      try {
        iterations = colon == std::string::npos ? -1 : std::stoi(item.substr(colon + 1));
      } catch (const std::exception&) {
        iterations = -1;
      }
      if (!dir || iterations <= 0) {
        throw IoError(f.origin() + ": registration.schedule entry '" + item +
                      "' must look like m2p:5 or p2m:5");
      }
      r.schedule.push_back({*dir, iterations});
    }
  }

  if (auto v = f.get_bool("detection", "swap_sides_in_back")) c.detection.swap_sides_in_back = *v;
  if (auto v = f.get_double("detection", "family_confusion")) c.detection.family_confusion = *v;
  if (auto v = f.get_double("detection", "landmark_confidence")) c.detection.landmark_confidence = *v;

  c.validate();
  return c;
}

PipelineConfig PipelineConfig::load(const fs::path& path) {
  return from_config(ConfigFile::load(path), path.parent_path());
}

ConfigFile PipelineConfig::to_config() const {
  ConfigFile f;
  f.set("bsv", "schema", std::string(kConfigSchema));
  if (!template_mesh.empty()) f.set("paths", "template", template_mesh.string());
  if (!ground_truth.empty()) f.set("paths", "ground_truth", ground_truth.string());
  f.set("paths", "output", output_dir.string());
  if (!subjects.empty()) {
    std::string list;
    for (const auto& s : subjects) list += (list.empty() ? "" : ", ") + s.string();
    f.set("paths", "subjects", list);
  }
  if (!subject.empty()) f.set("run", "subject", subject);
  if (seed) f.set("run", "seed", std::to_string(*seed));
  f.set("run", "condition", std::string(condition_name(condition)));
  if (real_mass) f.set("run", "real_mass", format_double(*real_mass));
  f.set("run", "seeds", std::to_string(seeds));
  std::string conds;
  for (auto cnd : conditions) conds += (conds.empty() ? "" : ", ") + std::string(condition_name(cnd));
  f.set("run", "conditions", conds);

  f.set("rig", "separation", format_double(rig.separation));
  f.set("rig", "camera_height", format_double(rig.camera_height));
  f.set("rig", "fx", format_double(rig.intrinsics.fx));
  f.set("rig", "fy", format_double(rig.intrinsics.fy));
  f.set("rig", "cx", format_double(rig.intrinsics.cx));
  f.set("rig", "cy", format_double(rig.intrinsics.cy));
  f.set("rig", "width", std::to_string(rig.intrinsics.width));
  f.set("rig", "height", std::to_string(rig.intrinsics.height));

  f.set("noise", "depth_sigma_at_1m", format_double(noise.depth_sigma_at_1m));
  f.set("noise", "front_translation_cm", format_vec3(noise.front_offset.translation_cm));
  f.set("noise", "front_rotation_deg", format_vec3(noise.front_offset.rotation_deg));
  f.set("noise", "back_translation_cm", format_vec3(noise.back_offset.translation_cm));
  f.set("noise", "back_rotation_deg", format_vec3(noise.back_offset.rotation_deg));
  f.set("noise", "front_translation_jitter_cm", format_vec3(noise.front_jitter.translation_cm));
  f.set("noise", "front_rotation_jitter_deg", format_vec3(noise.front_jitter.rotation_deg));
  f.set("noise", "back_translation_jitter_cm", format_vec3(noise.back_jitter.translation_cm));
  f.set("noise", "back_rotation_jitter_deg", format_vec3(noise.back_jitter.rotation_deg));

  f.set("cleaning", "enabled", clean ? "true" : "false");
  f.set("cleaning", "neighbors", std::to_string(cleaning.neighbors));
  f.set("cleaning", "std_ratio", format_double(cleaning.std_ratio));

  const auto& r = registration;
  f.set("registration", "per_cell_weight", format_double(r.per_cell_weight));
  f.set("registration", "alpha", format_double(r.regularization_alpha));
  f.set("registration", "correspondence_weight", format_double(r.correspondence_weight));
  f.set("registration", "inner_sweeps", std::to_string(r.inner_sweeps));
  if (r.max_correspondence_distance) {
    f.set("registration", "max_correspondence_distance", format_double(*r.max_correspondence_distance));
  }
  f.set("registration", "early_exit", r.early_exit ? "true" : "false");
  f.set("registration", "early_exit_tolerance", format_double(r.early_exit_tolerance));
  f.set("registration", "instability_distortion", format_double(r.instability_distortion));
  std::string sched;
  for (const auto& p : r.schedule) {
    sched += (sched.empty() ? "" : ", ") + std::string(direction_name(p.direction)) + ":" +
             std::to_string(p.iterations);
  }
  f.set("registration", "schedule", sched);

  f.set("detection", "swap_sides_in_back", detection.swap_sides_in_back ? "true" : "false");
  f.set("detection", "family_confusion", format_double(detection.family_confusion));
  f.set("detection", "landmark_confidence", format_double(detection.landmark_confidence));
  return f;
}

void PipelineConfig::validate() const {
  rig.intrinsics.validate();
  if (!(rig.separation > 0.0)) throw InvalidArgument("rig.separation must be positive");
  noise.validate();
  registration.validate();
  if (cleaning.neighbors == 0) throw InvalidArgument("cleaning.neighbors must be positive");
  if (!(cleaning.std_ratio >= 0.0)) throw InvalidArgument("cleaning.std_ratio must be non-negative");
  if (seeds < 1) throw InvalidArgument("run.seeds must be at least 1");
  if (conditions.empty()) throw InvalidArgument("run.conditions must not be empty");
  if (real_mass && !(*real_mass > 0.0)) throw InvalidArgument("run.real_mass must be positive");
  if (!(detection.family_confusion >= 0.0 && detection.family_confusion <= 1.0)) {
    throw InvalidArgument("detection.family_confusion must lie in [0, 1]");
  }
}

std::string PipelineConfig::subject_name() const {
  if (!subject.empty()) return subject;
  if (!ground_truth.empty()) return ground_truth.stem().string();
  return "subject";
}

std::uint64_t run_seed(std::uint64_t seed, std::string_view subject, ErrorCondition condition,
                       int k) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const auto mix = [&](std::string_view s) {
    for (unsigned char ch : s) {
      h ^= ch;
      h *= 0x100000001b3ULL;
    }
  };
  mix(subject);
  mix("/");
  mix(condition_name(condition));
  return seed + static_cast<std::uint64_t>(k) + h;
}

Simulation simulate(const TriangleMesh& ground_truth, const PipelineConfig& config,
                    std::uint64_t seed) {
  config.validate();
  Simulation sim;
  sim.capture = two_view_capture(ground_truth, config.rig, config.condition, config.noise, seed);
  std::optional<std::map<std::string, Vec3>> joints;
  if (ground_truth.has_labels()) joints = joints_from_labels(ground_truth);
  int k = 0;
  for (auto* pair : {&sim.front, &sim.back}) {
    const bool front = k == 0;
    const CapturedView& cv = front ? sim.capture.front : sim.capture.back;
    ViewInput& in = *pair;
    in.view = front ? View::Front : View::Back;
    in.depth = cv.depth;
    in.intrinsics = config.rig.intrinsics;
    in.reported_pose = cv.reported_pose;
    if (joints) {
      DetectionErrors errors = config.detection;
      errors.seed = seed * 2 + static_cast<std::uint64_t>(k);
      auto det = synthesize_detections(cv, *joints, in.view, errors);
      in.raw_mask = std::move(det.raw);
      in.landmarks = std::move(det.landmarks);
    }
    ++k;
  }
  return sim;
}

void write_simulation(const fs::path& dir, const Simulation& sim) {
  fs::create_directories(dir);
  for (const auto* v : {&sim.front, &sim.back}) {
    const CapturedView& cv = v->view == View::Front ? sim.capture.front : sim.capture.back;
    write_depth_image(view_file(dir, v->view, "depth.bsvd"), v->depth, v->intrinsics.fx,
                      v->intrinsics.fy, v->intrinsics.cx, v->intrinsics.cy);
    write_transform(view_file(dir, v->view, "pose.txt"), v->reported_pose);
    write_transform(view_file(dir, v->view, "true_pose.txt"), cv.camera.pose);
    LabeledPointCloud points;
    points.points = cv.cloud.points;
    write_ply_cloud(view_file(dir, v->view, "cloud.ply"), points);
    if (v->raw_mask) write_byte_image(view_file(dir, v->view, "mask.bsvm"), *v->raw_mask);
    if (v->landmarks) write_landmarks(view_file(dir, v->view, "landmarks.json"), *v->landmarks);
  }
}

ViewInput read_view(const fs::path& dir, View view) {
  ViewInput in;
  in.view = view;
  std::array<double, 4> k{};
  in.depth = read_depth_image(view_file(dir, view, "depth.bsvd"), &k);
  in.intrinsics = Intrinsics{k[0], k[1], k[2], k[3], in.depth.width, in.depth.height};
  in.intrinsics.validate();
  in.reported_pose = read_transform(view_file(dir, view, "pose.txt"));
  const auto mask = view_file(dir, view, "mask.bsvm");
  const auto landmarks = view_file(dir, view, "landmarks.json");
  if (fs::exists(mask) != fs::exists(landmarks)) {
    throw IoError(dir.string() + ": a label mask needs its landmarks file and vice versa");
  }
  if (fs::exists(mask)) {
    in.raw_mask = read_byte_image(mask);
    in.landmarks = read_landmarks(landmarks);
  }
  return in;
}

LabeledPointCloud view_cloud(const ViewInput& input, const PipelineConfig& config,
                             std::vector<std::string>* warnings) {
  VirtualCamera camera;
  camera.intrinsics = input.intrinsics;
  camera.pose = input.reported_pose;
  LabeledPointCloud cloud;
  if (input.raw_mask) {
    if (!input.landmarks) throw InvalidArgument("view_cloud: mask without landmarks");
    const ByteImage grouped = regroup_24_to_14(*input.raw_mask, default_part_mapping());
    const ByteImage fixed = relabel_by_body_lines(grouped, *input.landmarks, input.view);
    cloud = project_labels_to_cloud(fixed, input.depth, camera);
  } else {
    cloud = deproject(input.depth, camera);
  }
  if (cloud.empty()) throw GeometryError("view_cloud: the view contains no points");
  if (config.clean) cloud = statistical_outlier_removal(cloud, config.cleaning, warnings);
  return cloud;
}

Registration register_views(const TriangleMesh& tmpl, const ViewInput& front, const ViewInput& back,
                            const PipelineConfig& config, std::vector<std::string>* warnings) {
  Registration reg;
  reg.front = view_cloud(front, config, warnings);
  reg.back = view_cloud(back, config, warnings);
  reg.merged = merge(reg.front, reg.back, RigidTransform::identity(), RigidTransform::identity());
  reg.body = reg.merged.has_labels() ? drop_extremities(reg.merged) : reg.merged;
  if (reg.body.empty()) throw GeometryError("register: no body points left after dropping extremities");

  auto [centered, shift] = center_to_origin(reg.body);
  auto [aligned, params] = scale_template(tmpl.without_labels(), centered);
  reg.result = register_mesh(aligned, centered, config.registration);
  TriangleMesh fitted = reg.result.mesh;
  if (centered.has_labels()) fitted = propagate_labels_to_mesh(fitted, centered);

  reg.fitted = translated(fitted, -shift);
  reg.aligned_template = translated(aligned, -shift);
  reg.alignment = params;
  reg.alignment.post_translation -= shift;
  return reg;
}

void write_registration(const fs::path& dir, const Registration& reg) {
  fs::create_directories(dir);
  write_ply_cloud(dir / "front_world.ply", reg.front);
  write_ply_cloud(dir / "back_world.ply", reg.back);
  write_ply_cloud(dir / "merged.ply", reg.merged);
  write_ply_cloud(dir / "body.ply", reg.body);
  write_mesh(dir / "aligned_template.ply", reg.aligned_template);
  write_mesh(dir / "fitted.ply", reg.fitted);
  write_energy_log(dir / "energy.csv", reg.result.log);
}

VolumeReport measure_volumes(const TriangleMesh& fitted, const TriangleMesh* ground_truth,
                             const std::string& subject, ErrorCondition condition,
                             std::uint64_t seed, std::optional<double> real_mass) {
  VolumeReport report;
  report.subject = subject;
  report.condition = condition;
  report.seed = seed;
  report.real_mass = real_mass;
  const std::vector<SegmentLabel> evaluated(kEvaluatedSegments.begin(), kEvaluatedSegments.end());

  report.whole_body.name = std::string(kWholeBody);
  try {
    report.whole_body.estimated = signed_volume(fitted);
    if (ground_truth) {
      report.whole_body.ground_truth =
          ground_truth->has_labels() ? signed_volume(extract_segments(*ground_truth, evaluated))
                                     : signed_volume(*ground_truth);
    }
  } catch (const Error& e) {
    report.whole_body.error = e.what();
  }

  if (fitted.has_labels()) {
    for (auto label : kEvaluatedSegments) {
      VolumeEntry entry;
      entry.name = std::string(label_name(label));
      try {
        entry.estimated = signed_volume(extract_segment(fitted, label));
        if (ground_truth && ground_truth->has_labels()) {
          entry.ground_truth = signed_volume(extract_segment(*ground_truth, label));
        }
      } catch (const Error& e) {
        entry.error = e.what();
      }
      report.segments.push_back(std::move(entry));
    }
  }
  report.compute_errors();
  return report;
}

TriangleMesh make_box_subject(const Vec3& size, double yaw_deg, int divisions) {
  if (!(size.array() > 0.0).all()) throw InvalidArgument("make_box_subject: size must be positive");
  const Mat3 yaw = Eigen::AngleAxisd(yaw_deg * std::numbers::pi / 180.0, Vec3::UnitY()).toRotationMatrix();
  return transformed(make_box(size, {divisions, divisions, divisions}), yaw,
                     Vec3(0.0, size.y() / 2.0, 0.0));
}

TriangleMesh make_box_template(int divisions, double yaw_deg) {
  const Mat3 yaw = Eigen::AngleAxisd(yaw_deg * std::numbers::pi / 180.0, Vec3::UnitY()).toRotationMatrix();
  return transformed(make_cube(1.0, divisions), yaw, Vec3::Zero());
}

VolumeReport run_end_to_end(const TriangleMesh& ground_truth, const TriangleMesh& tmpl,
                            const PipelineConfig& config, std::uint64_t seed,
                            Registration* registration) {
  const Simulation sim = simulate(ground_truth, config, seed);
  Registration reg = register_views(tmpl, sim.front, sim.back, config);
  VolumeReport report = measure_volumes(reg.fitted, &ground_truth, config.subject_name(),
                                        config.condition, seed, config.real_mass);
  if (registration) *registration = std::move(reg);
  return report;
}

}  // namespace bsv
