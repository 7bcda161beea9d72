#pragma once

// Brute-force references shared by the unit tests and the acceptance binary.
// None of these call into the code they check, apart from mesh accessors.

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "bsv/arap.hpp"
#include "bsv/laplacian.hpp"
#include "bsv/mesh.hpp"
#include "bsv/point_cloud.hpp"
#include "bsv/primitives.hpp"
#include "bsv/spatial_index.hpp"
#include "support.hpp"

namespace bsv::test {

/// Sorted (distance, index) pairs; ties fall to the lower index.
inline std::vector<Neighbor> linear_knn(const std::vector<Vec3>& pts, const Vec3& q, std::size_t k) {
  std::vector<Neighbor> all;
  for (std::size_t i = 0; i < pts.size(); ++i) all.push_back({squared_distance(pts[i], q), i});
  std::sort(all.begin(), all.end());
  all.resize(std::min(k, all.size()));
  return all;
}

/// Mean distance to the k nearest other points, by sorting all distances.
inline std::vector<double> brute_mean_distances(const std::vector<Vec3>& pts, std::size_t k) {
  std::vector<double> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    std::vector<double> d;
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (j != i) d.push_back((pts[i] - pts[j]).norm());
    }
    std::sort(d.begin(), d.end());
    double sum = 0.0;
    for (std::size_t n = 0; n < k; ++n) sum += d[n];
    out.push_back(sum / static_cast<double>(k));
  }
  return out;
}

/// Indices kept by mean + ratio * sample std thresholding.
inline std::vector<std::size_t> brute_sor_keep(const std::vector<Vec3>& pts, std::size_t k, double ratio) {
  const auto d = brute_mean_distances(pts, k);
  double mu = 0.0;
  for (double x : d) mu += x;
  mu /= static_cast<double>(d.size());
  double ss = 0.0;
  for (double x : d) ss += (x - mu) * (x - mu);
  const double sigma = std::sqrt(ss / static_cast<double>(d.size() - 1));
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d[i] <= mu + ratio * sigma) keep.push_back(i);
  }
  return keep;
}

/// Gaussian blob with uniform outliers around it, shuffled.
inline LabeledPointCloud noisy_blob(std::mt19937_64& rng, std::size_t inliers, std::size_t outliers) {
  std::normal_distribution<double> g(0.0, 0.1);
  LabeledPointCloud c;
  for (std::size_t i = 0; i < inliers; ++i) c.points.emplace_back(g(rng), g(rng), g(rng));
  auto far = random_points(outliers, rng, -2.0, 2.0);
  c.points.insert(c.points.end(), far.begin(), far.end());
  std::shuffle(c.points.begin(), c.points.end(), rng);
  return c;
}

/// Label of the nearest cloud point per vertex, lowest index on ties.
inline std::vector<SegmentLabel> brute_nearest_labels(const std::vector<Vec3>& vertices,
                                                      const LabeledPointCloud& cloud) {
  std::vector<SegmentLabel> out;
  for (const auto& v : vertices) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      const double d = squared_distance(cloud.points[i], v);
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    out.push_back(cloud.labels[best]);
  }
  return out;
}

/// w_ij = 1/2 sum over incident faces of cot(opposite angle), angles from acos,
/// each cotangent clamped to +-clamp.
inline std::map<Edge, double> cot_weights(const TriangleMesh& mesh, double clamp = kCotangentClamp) {
  std::map<Edge, double> w;
  for (const auto& f : mesh.faces()) {
    for (int k = 0; k < 3; ++k) {
      const int apex = f[static_cast<std::size_t>(k)];
      const int a = f[static_cast<std::size_t>((k + 1) % 3)];
      const int b = f[static_cast<std::size_t>((k + 2) % 3)];
      const double angle = angle_at(mesh.vertex(apex), mesh.vertex(a), mesh.vertex(b));
      w[make_edge(a, b)] += 0.5 * std::clamp(1.0 / std::tan(angle), -clamp, clamp);
    }
  }
  return w;
}

// Singular values of the best-fit linear map from rest edge coordinates in
// the cell's principal plane to the deformed edges. They do not depend on
// which orthonormal basis of the plane is used.
inline Eigen::Vector2d cell_stretch(const std::vector<Vec3>& rest, const std::vector<Vec3>& cur, int i,
                                    const std::vector<int>& ring) {
  Eigen::MatrixXd e(3, static_cast<Eigen::Index>(ring.size()));
  Eigen::MatrixXd d(3, static_cast<Eigen::Index>(ring.size()));
  for (std::size_t k = 0; k < ring.size(); ++k) {
    e.col(static_cast<Eigen::Index>(k)) = rest[static_cast<std::size_t>(ring[k])] - rest[static_cast<std::size_t>(i)];
    d.col(static_cast<Eigen::Index>(k)) = cur[static_cast<std::size_t>(ring[k])] - cur[static_cast<std::size_t>(i)];
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> plane(e, Eigen::ComputeFullU);
  const Eigen::MatrixXd basis = plane.matrixU().leftCols(2);
  const Eigen::MatrixXd x = basis.transpose() * e;  // 2 x m
  const Eigen::MatrixXd f = d * x.transpose() * (x * x.transpose()).inverse();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(f);
  return svd.singularValues().head<2>();
}

struct OracleEnergy {
  double fitting = 0.0;
  double regularization = 0.0;
  double correspondence = 0.0;
};

inline OracleEnergy energy(const TriangleMesh& rest, const std::vector<Vec3>& cur, const RotationField& rot,
                           const CorrespondenceSet& corr, const RegistrationConfig& cfg) {
  const auto w = cot_weights(rest);
  std::vector<std::vector<int>> rings(rest.vertex_count());
  for (const auto& [edge, weight] : w) {
    rings[static_cast<std::size_t>(edge.first)].push_back(edge.second);
    rings[static_cast<std::size_t>(edge.second)].push_back(edge.first);
  }
  double area = 0.0;
  for (const auto& f : rest.faces()) {
    const Vec3 a = rest.vertex(f[0]), b = rest.vertex(f[1]), c = rest.vertex(f[2]);
    area += 0.5 * (b - a).cross(c - a).norm();
  }
  const auto& r = rest.vertices();
  OracleEnergy out;
  for (std::size_t i = 0; i < r.size(); ++i) {
    for (int j : rings[i]) {
      const auto js = static_cast<std::size_t>(j);
      const Vec3 diff = (cur[js] - cur[i]) - rot[i] * (r[js] - r[i]);
      out.fitting += cfg.per_cell_weight * w.at(make_edge(static_cast<int>(i), j)) * diff.squaredNorm();
    }
    const auto s = cell_stretch(r, cur, static_cast<int>(i), rings[i]);
    out.regularization += cfg.per_cell_weight * cfg.regularization_alpha * area *
                          ((s.array() - 1.0).square().sum());
  }
  for (const auto& c : corr.pairs) {
    out.correspondence += c.weight * (cur[static_cast<std::size_t>(c.vertex)] - c.target).squaredNorm();
  }
  return out;
}

/// Every other vertex pinned to a random target.
inline CorrespondenceSet random_correspondences(std::size_t n, std::mt19937_64& rng, double weight) {
  CorrespondenceSet set;
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (std::size_t i = 0; i < n; i += 2) {
    set.pairs.push_back({static_cast<int>(i), Vec3(u(rng), u(rng), u(rng)), weight});
  }
  return set;
}

/// Small jittered meshes (42 to 162 vertices) cycling through four shapes.
inline TriangleMesh trial_mesh(int trial, std::mt19937_64& rng) {
  switch (trial % 4) {
    case 0: return jittered(make_icosphere(2, 0.8), 0.02, rng);
    case 1: return jittered(make_cube(1.0, 5), 0.01, rng);
    case 2: return jittered(make_icosphere(1, 1.2), 0.05, rng);
    default: return jittered(make_box(Vec3(1.0, 0.3, 0.5), {8, 3, 4}), 0.005, rng);
  }
}

/// Six tight clusters at the axis tips of the unit sphere.
inline LabeledPointCloud clustered_targets(std::uint64_t seed = 1, int per_cluster = 200, double sigma = 0.01) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, sigma);
  LabeledPointCloud clusters;
  for (const Vec3 c : {Vec3(1, 0, 0), Vec3(-1, 0, 0), Vec3(0, 1, 0), Vec3(0, -1, 0), Vec3(0, 0, 1),
                       Vec3(0, 0, -1)}) {
    for (int i = 0; i < per_cluster; ++i) clusters.points.push_back(c + Vec3(g(rng), g(rng), g(rng)));
  }
  return clusters;
}

}  // namespace bsv::test
