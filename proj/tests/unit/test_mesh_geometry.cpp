#include <cmath>
#include <numbers>
#include <random>

#include "bsv/error.hpp"
#include "bsv/measures.hpp"
#include "bsv/mesh.hpp"
#include "bsv/primitives.hpp"
#include "bsv/topology.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace bsv;

using test::drop_faces;

TEST_CASE("mesh construction rejects bad faces") {
  std::vector<Vec3> v = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)};
  CHECK_THROWS_AS(TriangleMesh(v, {{0, 1, 3}}), InvalidArgument);
  CHECK_THROWS_AS(TriangleMesh(v, {{0, 1, 1}}), InvalidArgument);
  CHECK_THROWS_AS(TriangleMesh(v, {{0, 1, 2}}, {SegmentLabel::Torso}), InvalidArgument);
  v[2] = Vec3(0, std::nan(""), 0);
  CHECK_THROWS_AS(TriangleMesh(v, {{0, 1, 2}}), InvalidArgument);
}

TEST_CASE("regular tetrahedron volume and area") {
  const auto t = make_regular_tetrahedron();
  CHECK(is_watertight(t));
  CHECK(signed_volume(t) == doctest::Approx(1.0 / (6.0 * std::sqrt(2.0))).epsilon(1e-12));
  CHECK(surface_area(t) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));
  CHECK(signed_volume(t.flipped()) == doctest::Approx(-signed_volume(t)).epsilon(1e-12));
}

TEST_CASE("box volume is exact for any subdivision") {
  for (int d : {1, 3, 8}) {
    const auto b = make_box(Vec3(0.558, 0.52, 0.589), {d, d + 1, d + 2});
    CHECK(is_watertight(b));
    CHECK(signed_volume(b) == doctest::Approx(0.558 * 0.52 * 0.589).epsilon(1e-12));
    const double area = 2.0 * (0.558 * 0.52 + 0.52 * 0.589 + 0.558 * 0.589);
    CHECK(surface_area(b) == doctest::Approx(area).epsilon(1e-12));
  }
}

TEST_CASE("signed volume is invariant under rigid motion") {
  std::mt19937_64 rng(11);
  const auto base = test::jittered(make_icosphere(2, 0.7), 0.02, rng);
  const double v0 = signed_volume(base);
  for (int trial = 0; trial < 20; ++trial) {
    const Mat3 r = test::random_rotation(rng);
    const Vec3 t = test::random_points(1, rng, -5.0, 5.0)[0];
    const double v = signed_volume(transformed(base, r, t));
    CHECK(std::abs(v - v0) <= 1e-9 * std::abs(v0));
  }
}

TEST_CASE("icosphere volume and area converge") {
  const double r = 1.3;
  const double vol = 4.0 / 3.0 * std::numbers::pi * r * r * r;
  const double area = 4.0 * std::numbers::pi * r * r;
  const auto s3 = make_icosphere(3, r);
  CHECK(std::abs(signed_volume(s3) - vol) / vol < 0.01);
  CHECK(std::abs(surface_area(s3) - area) / area < 0.01);
  // inscribed polyhedra approach from below, monotonically
  double prev = 0.0;
  for (int level = 0; level <= 4; ++level) {
    const double v = signed_volume(make_icosphere(level, r));
    CHECK(v < vol);
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("open meshes are rejected by signed_volume") {
  const auto open = drop_faces(make_cube(1.0, 2), {0});
  CHECK_FALSE(is_watertight(open));
  CHECK(boundary_edge_count(open) == 3);
  CHECK_THROWS_AS(signed_volume(open), GeometryError);
}

TEST_CASE("fill_holes closes every fixture") {
  const auto fixtures = test::hole_fixtures();
  for (const auto& m : fixtures) {
    CHECK_FALSE(boundary_loops(m).empty());
    const auto closed = fill_holes(m);
    CHECK(boundary_edge_count(closed) == 0);
    CHECK(is_watertight(closed));
    // original faces are kept in order
    for (std::size_t f = 0; f < m.face_count(); ++f) {
      for (int k = 0; k < 3; ++k) {
        CHECK(closed.vertex(closed.faces()[f][static_cast<std::size_t>(k)]) ==
              m.vertex(m.faces()[f][static_cast<std::size_t>(k)]));
      }
    }
  }
}

TEST_CASE("filled cylinder volume matches the prism") {
  const int n = 48;
  const double r = 0.3, h = 1.0;
  const auto closed = fill_holes(make_open_cylinder(n, 4, r, h));
  // flat fan caps make the closed solid a regular n-gon prism
  const double polygon = 0.5 * n * r * r * std::sin(2.0 * std::numbers::pi / n);
  CHECK(std::abs(signed_volume(closed)) == doctest::Approx(polygon * h).epsilon(1e-9));
}

TEST_CASE("closed mesh has no boundary loops and fill_holes is a no-op") {
  const auto s = make_icosphere(1, 1.0);
  CHECK(boundary_loops(s).empty());
  const auto same = fill_holes(s);
  CHECK(same.face_count() == s.face_count());
  CHECK(same.vertex_count() == s.vertex_count());
}

TEST_CASE("topology of a cube") {
  const auto c = make_cube(1.0, 1);
  const auto topo = build_topology(c);
  CHECK(c.vertex_count() == 8);
  CHECK(c.face_count() == 12);
  CHECK(topo.edges.size() == 18);  // V - E + F = 2
  for (const auto& ef : topo.edge_faces) CHECK(ef.size() == 2);
  CHECK(is_orientation_consistent(c));
  CHECK(topo.find_edge(0, 0) == -1);
}

TEST_CASE("submesh carries labels") {
  const auto c = make_cube(1.0, 1);
  std::vector<SegmentLabel> labels(c.vertex_count(), SegmentLabel::Torso);
  labels[0] = SegmentLabel::Head;
  const auto part = submesh(c.with_labels(labels), {0, 1});
  CHECK(part.face_count() == 2);
  CHECK(part.has_labels());
  CHECK(part.labels().size() == part.vertex_count());
}

TEST_CASE("face_label majority and tie rule") {
  std::vector<Vec3> v = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)};
  const TriangleMesh m(v, {{0, 1, 2}},
                       {SegmentLabel::LeftThigh, SegmentLabel::Torso, SegmentLabel::LeftThigh});
  CHECK(m.face_label(0) == SegmentLabel::LeftThigh);
  const TriangleMesh tie(v, {{0, 1, 2}},
                         {SegmentLabel::LeftShin, SegmentLabel::Torso, SegmentLabel::LeftArm});
  CHECK(tie.face_label(0) == SegmentLabel::Torso);
}
