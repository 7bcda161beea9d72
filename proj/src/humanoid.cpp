#include "bsv/humanoid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <unordered_map>

#include "bsv/error.hpp"
#include "bsv/measures.hpp"

namespace bsv {

namespace {

constexpr double kBlend = 0.03;  // smooth-union width

struct Part {
  enum class Kind { Capsule, Ellipsoid } kind = Kind::Capsule;
  Vec3 a = Vec3::Zero();  // capsule start or ellipsoid center
  Vec3 b = Vec3::Zero();  // capsule end
  double ra = 0.0;
  double rb = 0.0;
  Vec3 radii = Vec3::Ones();
  SegmentLabel label = SegmentLabel::Torso;
  bool extremity = false;

  double distance(const Vec3& p) const {
    if (kind == Kind::Capsule) {
      const Vec3 ab = b - a;
      const double t = std::clamp((p - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
      return (p - (a + t * ab)).norm() - (ra + t * (rb - ra));
    }
    // ellipsoid bound from the normalized radius
    const Vec3 q = p - a;
    const double k0 = q.cwiseQuotient(radii).norm();
    const double k1 = q.cwiseQuotient(radii.cwiseProduct(radii)).norm();
    if (k1 == 0.0) return -radii.minCoeff();
    return k0 * (k0 - 1.0) / k1;
  }
};

Part capsule(const Vec3& a, const Vec3& b, double ra, double rb, SegmentLabel label,
             bool extremity = false) {
  Part p;
  p.kind = Part::Kind::Capsule;
  p.a = a;
  p.b = b;
  p.ra = ra;
  p.rb = rb;
  p.label = label;
  p.extremity = extremity;
  return p;
}

Part ellipsoid(const Vec3& c, const Vec3& r, SegmentLabel label, bool extremity = false) {
  Part p;
  p.kind = Part::Kind::Ellipsoid;
  p.a = c;
  p.radii = r;
  p.label = label;
  p.extremity = extremity;
  return p;
}

double smooth_min(double a, double b) {
  const double h = std::max(kBlend - std::abs(a - b), 0.0) / kBlend;
  return std::min(a, b) - 0.25 * h * h * kBlend;
}

struct Body {
  std::vector<Part> parts;
  std::map<std::string, Vec3> joints;
  double hip_height = 0.0;
};

Body build_body(const HumanoidParams& prm) {
  using L = SegmentLabel;
  const double s = prm.scale;
  const double g = prm.girth * prm.scale;
  const double theta = prm.arm_angle_deg * std::numbers::pi / 180.0;
  Body body;
  body.hip_height = 0.92 * s;

  auto& parts = body.parts;
  parts.push_back(ellipsoid(Vec3(0, 0.95, 0) * s, Vec3(0.17 * g, 0.12 * s, 0.11 * g), L::Torso));
  parts.push_back(ellipsoid(Vec3(0, 1.15, 0) * s, Vec3(0.16 * g, 0.20 * s, 0.105 * g), L::Torso));
  parts.push_back(ellipsoid(Vec3(0, 1.33, 0) * s, Vec3(0.18 * g, 0.14 * s, 0.11 * g), L::Torso));
  parts.push_back(capsule(Vec3(-0.17, 1.41, 0) * s, Vec3(0.17, 1.41, 0) * s, 0.06 * g, 0.06 * g,
                          L::Torso));
  parts.push_back(capsule(Vec3(0, 1.42, 0) * s, Vec3(0, 1.56, 0) * s, 0.055 * g, 0.055 * g,
                          L::Torso));
  parts.push_back(ellipsoid(Vec3(0, 1.66, 0.01) * s, Vec3(0.085, 0.115, 0.10) * s, L::Head, true));

  for (const double side : {1.0, -1.0}) {
    const bool left = side > 0.0;
    const std::string name = left ? "left_" : "right_";
    const Vec3 shoulder = Vec3(0.19 * side, 1.42, 0) * s;
    const Vec3 dir(side * std::sin(theta), -std::cos(theta), 0.0);
    const Vec3 elbow = shoulder + 0.30 * s * dir;
    const Vec3 wrist = elbow + 0.26 * s * dir;
    parts.push_back(capsule(shoulder, elbow, 0.05 * g, 0.042 * g,
                            left ? L::LeftArm : L::RightArm));
    parts.push_back(capsule(elbow, wrist, 0.04 * g, 0.03 * g,
                            left ? L::LeftForearm : L::RightForearm));
    parts.push_back(capsule(wrist, wrist + 0.12 * s * dir, 0.033 * g, 0.028 * g,
                            left ? L::LeftHand : L::RightHand, true));

    const Vec3 hip(side * prm.leg_spread * s, 0.92 * s, 0);
    const Vec3 knee = Vec3(side * (prm.leg_spread + 0.005), 0.50, 0) * s;
    const Vec3 ankle = Vec3(side * (prm.leg_spread + 0.01), 0.09, 0) * s;
    parts.push_back(capsule(hip, knee, 0.085 * g, 0.055 * g, left ? L::LeftThigh : L::RightThigh));
    parts.push_back(capsule(knee, ankle, 0.055 * g, 0.037 * g, left ? L::LeftShin : L::RightShin));
    parts.push_back(capsule(Vec3(ankle.x(), 0.05 * s, -0.02 * s),
                            Vec3(ankle.x() + side * 0.01 * s, 0.04 * s, 0.13 * s), 0.04 * g,
                            0.035 * g, left ? L::LeftFoot : L::RightFoot, true));

    body.joints[name + "shoulder"] = shoulder;
    body.joints[name + "elbow"] = elbow;
    body.joints[name + "wrist"] = wrist;
    body.joints[name + "hip"] = hip;
    body.joints[name + "knee"] = knee;
    body.joints[name + "ankle"] = ankle;
  }
  if (!prm.extremities) {
    std::erase_if(parts, [](const Part& p) { return p.extremity; });
  }
  return body;
}

double field(const std::vector<Part>& parts, const Vec3& p) {
  double d = parts.front().distance(p);
  for (std::size_t i = 1; i < parts.size(); ++i) d = smooth_min(d, parts[i].distance(p));
  return d;
}

Vec3 field_gradient(const std::vector<Part>& parts, const Vec3& p) {
  constexpr double h = 1e-5;
  Vec3 g;
  for (int k = 0; k < 3; ++k) {
    Vec3 e = Vec3::Zero();
    e[k] = h;
    g[k] = (field(parts, p + e) - field(parts, p - e)) / (2.0 * h);
  }
  return g;
}

Vec3 project_to_surface(const std::vector<Part>& parts, Vec3 p) {
  for (int it = 0; it < 5; ++it) {
    const double f = field(parts, p);
    const Vec3 g = field_gradient(parts, p);
    const double gg = g.squaredNorm();
    if (gg < 1e-12) break;
    p -= f * g / gg;
    if (std::abs(f) < 1e-10) break;
  }
  return p;
}

// Marching tetrahedra over the six-tetrahedra split of every grid cube.
TriangleMesh extract_surface(const std::vector<Part>& parts, double step) {
  BoundingBox box;
  for (const auto& part : parts) {
    const double r = part.kind == Part::Kind::Capsule ? std::max(part.ra, part.rb)
                                                      : part.radii.maxCoeff();
    for (const Vec3& c : {part.a, part.kind == Part::Kind::Capsule ? part.b : part.a}) {
      box.extend(c - Vec3::Constant(r));
      box.extend(c + Vec3::Constant(r));
    }
  }
  const Vec3 origin = box.min - Vec3::Constant(2.0 * step);
  const Eigen::Vector3i n = ((box.extent() + Vec3::Constant(4.0 * step)) / step)
                                .array()
                                .ceil()
                                .cast<int>()
                                .matrix() +
                            Eigen::Vector3i::Ones();
  const auto node = [&](int i, int j, int k) {
    return (static_cast<std::int64_t>(k) * n.y() + j) * n.x() + i;
  };
  const auto node_position = [&](std::int64_t id) {
    const auto i = id % n.x();
    const auto j = (id / n.x()) % n.y();
    const auto k = id / (static_cast<std::int64_t>(n.x()) * n.y());
    return Vec3(origin.x() + static_cast<double>(i) * step, origin.y() + static_cast<double>(j) * step,
                origin.z() + static_cast<double>(k) * step);
  };

  std::vector<double> values(static_cast<std::size_t>(n.x()) * n.y() * n.z());
  for (int k = 0; k < n.z(); ++k) {
    for (int j = 0; j < n.y(); ++j) {
      for (int i = 0; i < n.x(); ++i) {
        const auto id = node(i, j, k);
        double f = field(parts, node_position(id));
        if (f == 0.0) f = 1e-12;
        values[static_cast<std::size_t>(id)] = f;
      }
    }
  }

  std::vector<Vec3> vertices;
  std::vector<Face> faces;
  std::unordered_map<std::uint64_t, int> edge_vertex;
  const auto total = static_cast<std::uint64_t>(values.size());
  const auto crossing = [&](std::int64_t a, std::int64_t b) {
    if (a > b) std::swap(a, b);
    const std::uint64_t key = static_cast<std::uint64_t>(a) * total + static_cast<std::uint64_t>(b);
    auto it = edge_vertex.find(key);
    if (it != edge_vertex.end()) return it->second;
    const double fa = values[static_cast<std::size_t>(a)];
    const double fb = values[static_cast<std::size_t>(b)];
    const double t = std::clamp(fa / (fa - fb), 0.01, 0.99);
    vertices.push_back((1.0 - t) * node_position(a) + t * node_position(b));
    const int id = static_cast<int>(vertices.size()) - 1;
    edge_vertex.emplace(key, id);
    return id;
  };

  static constexpr int kPermutations[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                              {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  for (int k = 0; k + 1 < n.z(); ++k) {
    for (int j = 0; j + 1 < n.y(); ++j) {
      for (int i = 0; i + 1 < n.x(); ++i) {
        for (const auto& perm : kPermutations) {
          std::array<int, 3> c{i, j, k};
          std::array<std::int64_t, 4> tet;
          tet[0] = node(c[0], c[1], c[2]);
          for (int s = 0; s < 3; ++s) {
            ++c[static_cast<std::size_t>(perm[s])];
            tet[static_cast<std::size_t>(s) + 1] = node(c[0], c[1], c[2]);
          }
          std::array<std::int64_t, 4> in{}, out{};
          int n_in = 0, n_out = 0;
          for (auto v : tet) {
            if (values[static_cast<std::size_t>(v)] < 0.0) {
              in[static_cast<std::size_t>(n_in++)] = v;
            } else {
              out[static_cast<std::size_t>(n_out++)] = v;
            }
          }
          if (n_in == 0 || n_out == 0) continue;
          Vec3 dir = Vec3::Zero();
          for (int q = 0; q < n_out; ++q) dir += node_position(out[static_cast<std::size_t>(q)]) / n_out;
          for (int q = 0; q < n_in; ++q) dir -= node_position(in[static_cast<std::size_t>(q)]) / n_in;
          const auto emit = [&](int a, int b, int c2) {
            const Vec3 normal = (vertices[static_cast<std::size_t>(b)] - vertices[static_cast<std::size_t>(a)])
                                    .cross(vertices[static_cast<std::size_t>(c2)] -
                                           vertices[static_cast<std::size_t>(a)]);
            if (normal.dot(dir) < 0.0) std::swap(b, c2);
            faces.push_back({a, b, c2});
          };
          if (n_in == 1 || n_out == 1) {
            const auto lone = n_in == 1 ? in[0] : out[0];
            const auto& rest = n_in == 1 ? out : in;
            emit(crossing(lone, rest[0]), crossing(lone, rest[1]), crossing(lone, rest[2]));
          } else {
            const int ac = crossing(in[0], out[0]);
            const int ad = crossing(in[0], out[1]);
            const int bd = crossing(in[1], out[1]);
            const int bc = crossing(in[1], out[0]);
            emit(ac, ad, bd);
            emit(ac, bd, bc);
          }
        }
      }
    }
  }
  return TriangleMesh(std::move(vertices), std::move(faces));
}

std::vector<Vec3> relax(const std::vector<Part>& parts, const TriangleMesh& mesh, int iterations) {
  std::vector<Vec3> p = mesh.vertices();
  std::vector<std::vector<int>> ring(p.size());
  for (const auto& f : mesh.faces()) {
    for (int e = 0; e < 3; ++e) {
      ring[static_cast<std::size_t>(f[e])].push_back(f[(e + 1) % 3]);
      ring[static_cast<std::size_t>(f[e])].push_back(f[(e + 2) % 3]);
    }
  }
  for (auto& r : ring) {
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
  }
  for (auto& q : p) q = project_to_surface(parts, q);
  for (int it = 0; it < iterations; ++it) {
    std::vector<Vec3> next = p;
    for (std::size_t i = 0; i < p.size(); ++i) {
      Vec3 c = Vec3::Zero();
      for (int j : ring[i]) c += p[static_cast<std::size_t>(j)];
      c /= static_cast<double>(ring[i].size());
      const Vec3 nrm = field_gradient(parts, p[i]).normalized();
      Vec3 d = c - p[i];
      d -= d.dot(nrm) * nrm;
      next[i] = project_to_surface(parts, p[i] + 0.5 * d);
    }
    p = std::move(next);
  }
  return p;
}

double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

void HumanoidParams::validate() const {
  if (!(scale > 0.0) || !(girth > 0.0)) throw InvalidArgument("humanoid: scale and girth must be positive");
  if (!(arm_angle_deg > 20.0 && arm_angle_deg < 80.0)) {
    throw InvalidArgument("humanoid: arm angle must lie in (20, 80) degrees");
  }
  if (!(leg_spread > 0.0)) throw InvalidArgument("humanoid: leg spread must be positive");
  if (!(grid_step > 0.0) || grid_step > 0.05) {
    throw InvalidArgument("humanoid: grid step must lie in (0, 0.05] m");
  }
  if (relax_iterations < 0) throw InvalidArgument("humanoid: negative relax iterations");
}

HumanoidParams template_humanoid_params() {
  HumanoidParams p;
  p.grid_step = 0.025;
  return p;
}

HumanoidParams bundled_subject_params() {
  HumanoidParams p;
  p.scale = 1.04;
  p.girth = 1.1;
  p.arm_angle_deg = 52.0;
  p.leg_spread = 0.115;
  return p;
}

HumanoidParams sampled_subject_params(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  HumanoidParams p;
  p.scale = 0.92 + 0.16 * unit_uniform(rng);
  p.girth = 0.9 + 0.25 * unit_uniform(rng);
  p.arm_angle_deg = 48.0 + 7.0 * unit_uniform(rng);
  return p;
}

double humanoid_field(const HumanoidParams& params, const Vec3& p) {
  params.validate();
  return field(build_body(params).parts, p);
}

Humanoid make_humanoid(const HumanoidParams& params) {
  params.validate();
  const Body body = build_body(params);
  TriangleMesh raw = extract_surface(body.parts, params.grid_step);
  std::vector<Vec3> positions = relax(body.parts, raw, params.relax_iterations);

  std::vector<SegmentLabel> labels(positions.size());
  for (std::size_t i = 0; i < positions.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& part : body.parts) {
      const double d = part.distance(positions[i]);
      if (d < best) {
        best = d;
        labels[i] = part.label;
      }
    }
    if (family_of(labels[i]) == LimbFamily::Leg && limb_level(labels[i]) == 0 &&
        positions[i].y() > body.hip_height) {
      labels[i] = SegmentLabel::Torso;
    }
  }
  Humanoid h;
  h.mesh = TriangleMesh(std::move(positions), raw.faces(), std::move(labels));
  if (signed_volume_unchecked(h.mesh) < 0.0) h.mesh = h.mesh.flipped();
  h.joints = body.joints;
  return h;
}

TriangleMesh make_humanoid_template(const HumanoidParams& params) {
  const Humanoid body = make_humanoid(params);
  const auto cut = extract_segments(body.mesh, {kEvaluatedSegments.begin(), kEvaluatedSegments.end()});
  // rim vertices still carry the label of the part that was cut away
  auto labels = cut.labels();
  for (auto& l : labels) {
    if (l == SegmentLabel::Head) {
      l = SegmentLabel::Torso;
    } else if (is_extremity(l)) {
      l = make_limb_label(family_of(l), side_of(l), 1);
    }
  }
  return cut.with_labels(labels);
}

SyntheticDetections synthesize_detections(const CapturedView& view,
                                          const std::map<std::string, Vec3>& joints, View which,
                                          const DetectionErrors& errors) {
  if (view.labels.size() == 0) throw InvalidArgument("synthesize_detections: view has no labels");
  const bool front = which == View::Front;
  SyntheticDetections out;
  for (const auto& [name, world] : joints) {
    const auto px = view.camera.project(world);
    if (!px) throw GeometryError("synthesize_detections: joint '" + name + "' is behind the camera");
    out.landmarks[name] = Landmark{px->x(), px->y(), errors.landmark_confidence};
  }
  const auto& ls = out.landmarks;
  const double mid_u = 0.25 * (ls.at("left_shoulder").x + ls.at("right_shoulder").x +
                               ls.at("left_hip").x + ls.at("right_hip").x);

  std::mt19937_64 rng(errors.seed);
  out.raw = ByteImage(view.labels.width, view.labels.height);
  for (int v = 0; v < view.labels.height; ++v) {
    for (int u = 0; u < view.labels.width; ++u) {
      const auto label = label_from_ordinal(view.labels.at(u, v));
      if (!label) throw InvalidArgument("synthesize_detections: bad label value");
      if (*label == SegmentLabel::Background) {
        out.raw.at(u, v) = kRawBackground;
        continue;
      }
      SegmentLabel reported = *label;
      if (is_limb(reported)) {
        BodySide side = side_of(reported);
        LimbFamily family = family_of(reported);
        const int level = limb_level(reported);
        if (!front && errors.swap_sides_in_back) {
          side = side == BodySide::Left ? BodySide::Right : BodySide::Left;
        }
        if (family == LimbFamily::Arm && level == 1 && unit_uniform(rng) < errors.family_confusion) {
          family = LimbFamily::Leg;
        }
        reported = make_limb_label(family, side, level);
      }
      const bool image_right = u > mid_u;
      const bool subject_left = front ? image_right : !image_right;
      out.raw.at(u, v) = static_cast<std::uint8_t>(raw_part_for(reported, front, subject_left));
    }
  }
  return out;
}

}  // namespace bsv
