#include <filesystem>
#include <fstream>
#include <sstream>

#include "bsv/config.hpp"
#include "bsv/error.hpp"
#include "bsv/io.hpp"
#include "bsv/measures.hpp"
#include "bsv/pipeline.hpp"
#include "doctest.h"

using namespace bsv;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("config file parsing") {
  const auto f = ConfigFile::parse(
      "# comment\n"
      "top = 1\n"
      "[Run]\n"
      "  Seed = 42  \n"
      "; another comment\n"
      "condition = l515\n"
      "flag = yes\n"
      "ratio = 0.25\n"
      "[empty]\n");
  CHECK(f.get("", "top") == "1");
  CHECK(f.get_int("run", "seed") == 42);
  CHECK(f.get("run", "condition") == "l515");
  CHECK(f.get_bool("run", "flag") == true);
  CHECK(f.get_double("run", "ratio") == 0.25);
  CHECK_FALSE(f.get("run", "missing"));
  CHECK_FALSE(f.get("nosection", "x"));
  const auto unused = f.unused_keys();
  CHECK(unused == std::vector<std::string>{});

  const auto g = ConfigFile::parse("[a]\nx = 1\ny = 2\n");
  g.get("a", "x");
  CHECK(g.unused_keys() == std::vector<std::string>{"a.y"});

  CHECK_THROWS_WITH_AS(ConfigFile::parse("[a]\nx = 1\nx = 2\n", "f"), doctest::Contains("f:3"), IoError);
  CHECK_THROWS_AS(ConfigFile::parse("[a\n"), IoError);
  CHECK_THROWS_AS(ConfigFile::parse("novalue\n"), IoError);
  CHECK_THROWS_AS(ConfigFile::parse("[a]\nx = 1.5\n").get_int("a", "x"), IoError);
  CHECK_THROWS_AS(ConfigFile::parse("[a]\nx = 1.5m\n").get_double("a", "x"), IoError);
  CHECK_THROWS_AS(ConfigFile::parse("[a]\nx = maybe\n").get_bool("a", "x"), IoError);
}

TEST_CASE("pipeline config round-trips through text") {
  TempDir tmp("bsv_pipeline_cfg");
  std::ofstream(tmp.path / "gt.ply").put('x');
  PipelineConfig c;
  c.ground_truth = tmp.path / "gt.ply";
  c.seed = 99;
  c.condition = ErrorCondition::L5Ca;
  c.clean = false;
  c.cleaning.neighbors = 12;
  c.noise.front_offset.translation_cm = Vec3(0.1, 0.2, -3.0);
  c.registration.correspondence_weight = 1e7;
  c.registration.max_correspondence_distance = 0.05;
  c.registration.schedule = {{CorrespondenceDirection::PointToMesh, 3}};
  c.real_mass = 71.5;
  c.conditions = {ErrorCondition::NoEr, ErrorCondition::L515};
  c.seeds = 5;
  const auto text = c.to_config().to_string();
  const auto back = PipelineConfig::from_config(ConfigFile::parse(text));
  CHECK(back.to_config().to_string() == text);
  CHECK(back.seed == 99u);
  CHECK(back.condition == ErrorCondition::L5Ca);
  CHECK_FALSE(back.clean);
  CHECK(back.noise.front_offset.translation_cm == Vec3(0.1, 0.2, -3.0));
  CHECK(back.registration.schedule.size() == 1);
  CHECK(back.registration.max_correspondence_distance == 0.05);
  CHECK(back.real_mass == 71.5);
  CHECK(back.seeds == 5);
}

TEST_CASE("pipeline config errors") {
  CHECK_THROWS_AS(PipelineConfig::from_config(ConfigFile::parse("[bsv]\nschema = bsv.config/0\n")), IoError);
  CHECK_THROWS_AS(PipelineConfig::from_config(ConfigFile::parse("[paths]\nground_truth = /nonexistent/x.ply\n")), IoError);
  CHECK_THROWS_AS(PipelineConfig::from_config(ConfigFile::parse("[run]\ncondition = perfect\n")), IoError);
  CHECK_THROWS_AS(PipelineConfig::from_config(ConfigFile::parse("[registration]\nschedule = m2p:5, x2y:3\n")), IoError);
  CHECK_THROWS_AS(PipelineConfig::from_config(ConfigFile::parse("[noise]\nfront_translation_cm = 1, 2\n")), IoError);
  CHECK_THROWS(PipelineConfig::from_config(ConfigFile::parse("[registration]\nalpha = -1\n")));
  CHECK_THROWS(PipelineConfig::from_config(ConfigFile::parse("[run]\nseed = -3\n")));
}

TEST_CASE("relative paths resolve against the config directory") {
  TempDir tmp("bsv_pipeline_rel");
  fs::create_directories(tmp.path / "assets");
  std::ofstream(tmp.path / "assets" / "gt.ply").put('x');
  std::ofstream(tmp.path / "run.cfg") << "[paths]\nground_truth = assets/gt.ply\noutput = out\n";
  const auto c = PipelineConfig::load(tmp.path / "run.cfg");
  CHECK(c.ground_truth == tmp.path / "assets" / "gt.ply");
  CHECK(c.output_dir == tmp.path / "out");
  CHECK(c.subject_name() == "gt");
}

TEST_CASE("run seeds are stable") {
  CHECK(run_seed(7, "bundled", ErrorCondition::NoEr, 2) == 13398196720354263897ULL);
  CHECK(run_seed(7, "bundled", ErrorCondition::NoEr, 0) != run_seed(7, "bundled", ErrorCondition::L515, 0));
  CHECK(run_seed(7, "a", ErrorCondition::NoEr, 0) != run_seed(7, "b", ErrorCondition::NoEr, 0));
}

TEST_CASE("box simulation: artifacts are byte-identical and reload") {
  TempDir tmp("bsv_pipeline_sim");
  const auto box = make_box_subject(kBox2Size);
  PipelineConfig c;
  c.condition = ErrorCondition::L5Ca;
  const auto sim = simulate(box, c, 17);
  write_simulation(tmp.path / "a", sim);
  write_simulation(tmp.path / "b", simulate(box, c, 17));
  for (const auto* name : {"front_depth.bsvd", "back_depth.bsvd", "front_pose.txt", "back_cloud.ply"}) {
    CHECK(slurp(tmp.path / "a" / name) == slurp(tmp.path / "b" / name));
  }
  CHECK_FALSE(fs::exists(tmp.path / "a" / "front_mask.bsvm"));  // unlabeled ground truth

  const auto front = read_view(tmp.path / "a", View::Front);
  CHECK(front.intrinsics.width == c.rig.intrinsics.width);
  CHECK(front.intrinsics.fx == c.rig.intrinsics.fx);
  CHECK((front.reported_pose.translation - sim.front.reported_pose.translation).norm() < 1e-12);
  const auto truth = read_transform(tmp.path / "a" / "front_true_pose.txt");
  CHECK((truth.translation - sim.capture.front.camera.pose.translation).norm() < 1e-12);
}

TEST_CASE("box end to end, unlabeled ground truth") {
  const auto box = make_box_subject(kBox1Size);
  PipelineConfig c;
  c.clean = false;
  Registration reg;
  const auto report = run_end_to_end(box, make_box_template(), c, 1, &reg);
  CHECK(report.segments.empty());
  REQUIRE(report.whole_body.rve);
  CHECK(*report.whole_body.ground_truth == doctest::Approx(signed_volume(box)));
  CHECK(*report.whole_body.estimated == doctest::Approx(signed_volume(reg.fitted)));
  CHECK(reg.result.log.size() == 20);
  CHECK_FALSE(reg.fitted.has_labels());
  // the fitted mesh is back in the world frame, over the box
  const auto fb = bounding_box(reg.fitted.vertices());
  const auto gb = bounding_box(box.vertices());
  CHECK((fb.center() - gb.center()).norm() < 0.05);
}

TEST_CASE("measure_volumes reports failed segments and continues") {
  const auto box = make_box_subject(kBox1Size);
  std::vector<SegmentLabel> labels(box.vertex_count(), SegmentLabel::Torso);
  const auto labeled = box.with_labels(labels);
  const auto r = measure_volumes(labeled, &labeled, "x", ErrorCondition::NoEr, 0, 100.0);
  CHECK(*r.whole_body.rve == doctest::Approx(0.0));
  REQUIRE(r.segments.size() == kEvaluatedSegments.size());
  CHECK(r.segments[0].ok());
  CHECK(*r.segments[0].rve == doctest::Approx(0.0));
  for (std::size_t i = 1; i < r.segments.size(); ++i) CHECK_FALSE(r.segments[i].ok());
  CHECK(*r.rme == doctest::Approx(rme(signed_volume(box), 100.0)));
}
