#include <filesystem>
#include <fstream>

#include "bsv/error.hpp"
#include "bsv/image.hpp"
#include "bsv/io.hpp"
#include "bsv/measures.hpp"
#include "bsv/primitives.hpp"
#include "doctest.h"

using namespace bsv;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path = fs::temp_directory_path() / "bsv_io_test";
  TempDir() { fs::create_directories(path); }
  ~TempDir() { fs::remove_all(path); }
};

TriangleMesh labeled_cube() {
  const auto c = make_cube(0.7, 3);
  std::vector<SegmentLabel> labels;
  for (const auto& p : c.vertices()) labels.push_back(p.y() > 0 ? SegmentLabel::Head : SegmentLabel::Torso);
  return c.with_labels(labels);
}

}  // namespace

TEST_CASE("PLY mesh round-trip, binary and ascii") {
  TempDir tmp;
  const auto m = labeled_cube();
  for (auto fmt : {PlyFormat::BinaryLittleEndian, PlyFormat::Ascii}) {
    write_mesh(tmp.path / "m.ply", m, fmt);
    const auto back = read_mesh(tmp.path / "m.ply");
    CHECK(back.vertices() == m.vertices());
    CHECK(back.faces() == m.faces());
    CHECK(back.labels() == m.labels());
  }
}

TEST_CASE("OBJ round-trip and inward meshes are flipped") {
  TempDir tmp;
  const auto m = make_icosphere(1, 1.0);
  write_obj(tmp.path / "m.obj", m.flipped());
  const auto back = read_mesh(tmp.path / "m.obj");
  CHECK(signed_volume(back) == doctest::Approx(signed_volume(m)));
  std::ofstream(tmp.path / "quad.obj") << "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n";
  CHECK(read_mesh(tmp.path / "quad.obj").face_count() == 2);
}

TEST_CASE("point cloud PLY keeps labels and colours") {
  TempDir tmp;
  LabeledPointCloud c;
  c.points = {Vec3(1, 2, 3), Vec3(-1, 0.5, 1e-3)};
  c.labels = {SegmentLabel::LeftShin, SegmentLabel::Torso};
  c.colors = {Rgb{1, 2, 3}, Rgb{250, 0, 9}};
  write_ply_cloud(tmp.path / "c.ply", c);
  const auto back = read_ply_cloud(tmp.path / "c.ply");
  CHECK(back.points == c.points);
  CHECK(back.labels == c.labels);
  CHECK(back.colors == c.colors);
}

TEST_CASE("transforms, depth and mask files") {
  TempDir tmp;
  const auto t = RigidTransform::from_axis_angle(Vec3(0, 1, 0), 0.3, Vec3(1, 2, 3));
  write_transform(tmp.path / "t.txt", t);
  const auto tb = read_transform(tmp.path / "t.txt");
  CHECK((tb.rotation - t.rotation).norm() < 1e-15);
  CHECK(tb.translation == t.translation);

  DepthImage d(5, 4, 0.0);
  d.at(1, 2) = 1.25;
  d.at(4, 3) = 2.5;
  write_depth_image(tmp.path / "d.bsvd", d, 100, 101, 2, 1.5);
  std::array<double, 4> k{};
  const auto db = read_depth_image(tmp.path / "d.bsvd", &k);
  CHECK(db.width == 5);
  CHECK(db.height == 4);
  CHECK(db.pixels == d.pixels);  // values representable in float32
  CHECK(k == std::array<double, 4>{100, 101, 2, 1.5});

  ByteImage m(3, 2, 7);
  m.at(2, 1) = 255;
  write_byte_image(tmp.path / "m.bsvm", m);
  CHECK(read_byte_image(tmp.path / "m.bsvm").pixels == m.pixels);
}

TEST_CASE("malformed files raise IoError") {
  TempDir tmp;
  std::ofstream(tmp.path / "bad.ply") << "not a ply\n";
  CHECK_THROWS_AS(read_mesh(tmp.path / "bad.ply"), IoError);
  CHECK_THROWS_AS(read_mesh(tmp.path / "missing.ply"), IoError);
  CHECK_THROWS_AS(read_mesh(tmp.path / "x.stl"), IoError);
  std::ofstream(tmp.path / "t.txt") << "1 0 0 0\n0 2 0 0\n0 0 1 0\n0 0 0 1\n";
  CHECK_THROWS_AS(read_transform(tmp.path / "t.txt"), IoError);
}
