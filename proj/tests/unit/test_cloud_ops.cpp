#include <algorithm>
#include <cmath>
#include <random>

#include "bsv/cloud_ops.hpp"
#include "bsv/error.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace bsv;

using test::brute_mean_distances;
using test::brute_sor_keep;
using test::noisy_blob;

TEST_CASE("mean neighbor distances match brute force") {
  std::mt19937_64 rng(17);
  const auto cloud = noisy_blob(rng, 700, 50);
  for (std::size_t k : {1u, 8u, 60u}) {
    const auto got = mean_neighbor_distances(cloud, k);
    const auto expected = brute_mean_distances(cloud.points, k);
    REQUIRE(got.size() == expected.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i] == doctest::Approx(expected[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("statistical outlier removal matches a brute-force mu/sigma recomputation") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 5; ++trial) {
    auto cloud = noisy_blob(rng, 900, 100);
    cloud.labels.assign(cloud.size(), SegmentLabel::Torso);
    for (std::size_t i = 0; i < cloud.size(); i += 7) cloud.labels[i] = SegmentLabel::LeftArm;
    for (auto [k, ratio] : {std::pair<std::size_t, double>{30, 0.05}, {10, 1.0}, {100, -0.5}}) {
      const auto keep = brute_sor_keep(cloud.points, k, ratio);
      const auto out = statistical_outlier_removal(cloud, {k, ratio});
      REQUIRE(out.size() == keep.size());
      for (std::size_t n = 0; n < keep.size(); ++n) {
        CHECK(out.points[n] == cloud.points[keep[n]]);
        CHECK(out.labels[n] == cloud.labels[keep[n]]);
      }
    }
  }
}

TEST_CASE("far outliers are removed") {
  std::mt19937_64 rng(8);
  auto cloud = noisy_blob(rng, 1000, 0);
  cloud.points.emplace_back(10.0, 10.0, 10.0);
  const auto out = statistical_outlier_removal(cloud, {20, 1.0});
  CHECK(std::find(out.points.begin(), out.points.end(), Vec3(10.0, 10.0, 10.0)) == out.points.end());
}

TEST_CASE("small clouds clamp k with a warning") {
  const auto cloud = test::cloud_of({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(5, 5, 5)});
  std::vector<std::string> warnings;
  const auto out = statistical_outlier_removal(cloud, {600, 0.05}, &warnings);
  CHECK_FALSE(warnings.empty());
  CHECK(out.size() < cloud.size());
  CHECK_THROWS_AS(statistical_outlier_removal(LabeledPointCloud{}), InvalidArgument);
}

TEST_CASE("merge applies both transforms, front first") {
  LabeledPointCloud f = test::cloud_of({Vec3(0, 0, 1)});
  LabeledPointCloud b = test::cloud_of({Vec3(0, 0, 1), Vec3(1, 0, 0)});
  f.labels = {SegmentLabel::Torso};
  b.labels = {SegmentLabel::Head, SegmentLabel::LeftFoot};
  const auto tf = RigidTransform::from_axis_angle(Vec3::UnitY(), 0.0, Vec3(0, 1, 0));
  const auto tb = RigidTransform::from_axis_angle(Vec3::UnitY(), std::acos(-1.0), Vec3(0, 0, 2));
  const auto m = merge(f, b, tf, tb);
  REQUIRE(m.size() == 3);
  CHECK((m.points[0] - Vec3(0, 1, 1)).norm() < 1e-12);
  CHECK((m.points[1] - Vec3(0, 0, 1)).norm() < 1e-12);
  CHECK((m.points[2] - Vec3(-1, 0, 2)).norm() < 1e-12);
  CHECK(m.labels[2] == SegmentLabel::LeftFoot);

  b.labels.clear();
  CHECK_FALSE(merge(f, b, tf, tb).has_labels());
}

TEST_CASE("drop_extremities keeps the evaluated segments only") {
  LabeledPointCloud c;
  for (auto l : kBodySegments) {
    c.points.emplace_back(ordinal(l), 0, 0);
    c.labels.push_back(l);
  }
  const auto out = drop_extremities(c);
  CHECK(out.size() == kEvaluatedSegments.size());
  for (auto l : out.labels) CHECK_FALSE(is_extremity(l));
  CHECK_THROWS_AS(drop_extremities(test::cloud_of({Vec3::Zero()})), InvalidArgument);
}
