#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "bsv/arap.hpp"
#include "bsv/cloud_ops.hpp"
#include "bsv/error.hpp"
#include "bsv/humanoid.hpp"
#include "bsv/io.hpp"
#include "bsv/measures.hpp"
#include "bsv/metrics.hpp"
#include "bsv/pipeline.hpp"
#include "bsv/primitives.hpp"
#include "bsv/segmentation.hpp"
#include "bsv/topology.hpp"

namespace py = pybind11;
using namespace bsv;

namespace {

using Points = py::array_t<double, py::array::c_style | py::array::forcecast>;
using Indices = py::array_t<int, py::array::c_style | py::array::forcecast>;
using Bytes = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

std::vector<Vec3> to_points(const Points& a, const char* what) {
  if (a.ndim() != 2 || a.shape(1) != 3) throw InvalidArgument(std::string(what) + " must have shape (n, 3)");
  const auto r = a.unchecked<2>();
  std::vector<Vec3> out(static_cast<std::size_t>(a.shape(0)));
  for (py::ssize_t i = 0; i < a.shape(0); ++i) out[static_cast<std::size_t>(i)] = Vec3(r(i, 0), r(i, 1), r(i, 2));
  return out;
}

py::array_t<double> from_points(const std::vector<Vec3>& pts) {
  py::array_t<double> a({static_cast<py::ssize_t>(pts.size()), py::ssize_t{3}});
  auto w = a.mutable_unchecked<2>();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (int k = 0; k < 3; ++k) w(static_cast<py::ssize_t>(i), k) = pts[i][k];
  }
  return a;
}

std::vector<SegmentLabel> to_labels(const Bytes& a) {
  std::vector<SegmentLabel> out;
  const auto r = a.unchecked<1>();
  for (py::ssize_t i = 0; i < a.shape(0); ++i) {
    const auto l = label_from_ordinal(r(i));
    if (!l) throw InvalidArgument("label value " + std::to_string(r(i)) + " out of range");
    out.push_back(*l);
  }
  return out;
}

py::array_t<std::uint8_t> from_labels(const std::vector<SegmentLabel>& labels) {
  py::array_t<std::uint8_t> a(static_cast<py::ssize_t>(labels.size()));
  auto w = a.mutable_unchecked<1>();
  for (std::size_t i = 0; i < labels.size(); ++i) w(static_cast<py::ssize_t>(i)) = ordinal(labels[i]);
  return a;
}

TriangleMesh make_mesh(const Points& vertices, const Indices& faces, std::optional<Bytes> labels) {
  if (faces.ndim() != 2 || faces.shape(1) != 3) throw InvalidArgument("faces must have shape (m, 3)");
  const auto r = faces.unchecked<2>();
  std::vector<Face> f(static_cast<std::size_t>(faces.shape(0)));
  for (py::ssize_t i = 0; i < faces.shape(0); ++i) f[static_cast<std::size_t>(i)] = {r(i, 0), r(i, 1), r(i, 2)};
  return TriangleMesh(to_points(vertices, "vertices"), std::move(f), labels ? to_labels(*labels) : std::vector<SegmentLabel>{});
}

ErrorCondition condition_arg(const std::string& text) {
  const auto c = parse_condition(text);
  if (!c) throw InvalidArgument("unknown condition '" + text + "' (noer, cali, l515, l5ca)");
  return *c;
}

SegmentLabel label_arg(const std::string& name) {
  const auto l = label_from_name(name);
  if (!l) throw InvalidArgument("unknown segment '" + name + "'");
  return *l;
}

py::dict entry_dict(const VolumeEntry& e) {
  py::dict d;
  d["name"] = e.name;
  d["estimated"] = e.estimated;
  d["ground_truth"] = e.ground_truth;
  d["rve"] = e.rve;
  d["error"] = e.error;
  return d;
}

py::dict report_dict(const VolumeReport& r) {
  py::dict d;
  d["subject"] = r.subject;
  d["condition"] = std::string(condition_name(r.condition));
  d["seed"] = r.seed;
  d["whole_body"] = entry_dict(r.whole_body);
  py::list segments;
  for (const auto& s : r.segments) segments.append(entry_dict(s));
  d["segments"] = segments;
  d["real_mass"] = r.real_mass;
  d["rme"] = r.rme;
  return d;
}

std::vector<SchedulePhase> schedule_arg(const std::vector<std::pair<std::string, int>>& phases) {
  std::vector<SchedulePhase> out;
  for (const auto& [name, n] : phases) {
    const auto d = parse_direction(name);
    if (!d) throw InvalidArgument("unknown direction '" + name + "' (m2p, p2m)");
    out.push_back({*d, n});
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_bsv, m) {
  m.doc() = "Body segment volumes from two depth views";

  static py::exception<Error> error(m, "Error", PyExc_RuntimeError);
  static py::exception<GeometryError> geometry_error(m, "GeometryError", error.ptr());
  static py::exception<SolverError> solver_error(m, "SolverError", error.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const InvalidArgument& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const IoError& e) {
      PyErr_SetString(PyExc_OSError, e.what());
    } catch (const GeometryError& e) {
      PyErr_SetString(geometry_error.ptr(), e.what());
    } catch (const SolverError& e) {
      PyErr_SetString(solver_error.ptr(), e.what());
    } catch (const Error& e) {
      PyErr_SetString(error.ptr(), e.what());
    }
  });

  py::class_<TriangleMesh>(m, "Mesh")
      .def(py::init(&make_mesh), py::arg("vertices"), py::arg("faces"), py::arg("labels") = py::none())
      .def_property_readonly("vertices", [](const TriangleMesh& t) { return from_points(t.vertices()); })
      .def_property_readonly("faces",
                             [](const TriangleMesh& t) {
                               py::array_t<int> a({static_cast<py::ssize_t>(t.face_count()), py::ssize_t{3}});
                               auto w = a.mutable_unchecked<2>();
                               for (std::size_t i = 0; i < t.face_count(); ++i) {
                                 for (int k = 0; k < 3; ++k) w(static_cast<py::ssize_t>(i), k) = t.faces()[i][static_cast<std::size_t>(k)];
                               }
                               return a;
                             })
      .def_property_readonly("labels",
                             [](const TriangleMesh& t) -> py::object {
                               if (!t.has_labels()) return py::none();
                               return from_labels(t.labels());
                             })
      .def_property_readonly("vertex_count", &TriangleMesh::vertex_count)
      .def_property_readonly("face_count", &TriangleMesh::face_count)
      .def("without_labels", &TriangleMesh::without_labels)
      .def("__repr__", [](const TriangleMesh& t) {
        return "<bsv.Mesh " + std::to_string(t.vertex_count()) + " vertices, " + std::to_string(t.face_count()) +
               " faces" + (t.has_labels() ? ", labeled>" : ">");
      });

  m.def("read_mesh", &read_mesh, py::arg("path"));
  m.def("write_mesh", [](const std::filesystem::path& p, const TriangleMesh& t, bool ascii) {
    write_mesh(p, t, ascii ? PlyFormat::Ascii : PlyFormat::BinaryLittleEndian);
  }, py::arg("path"), py::arg("mesh"), py::arg("ascii") = false);

  m.def("signed_volume", &signed_volume, py::arg("mesh"));
  m.def("surface_area", &surface_area, py::arg("mesh"));
  m.def("is_watertight", &is_watertight, py::arg("mesh"));
  m.def("fill_holes", [](const TriangleMesh& t) { return fill_holes(t); }, py::arg("mesh"));
  m.def("extract_segment", [](const TriangleMesh& t, const std::string& name) {
    return extract_segment(t, label_arg(name));
  }, py::arg("mesh"), py::arg("segment"));

  m.def("make_icosphere", [](int levels, double radius) { return make_icosphere(levels, radius); },
        py::arg("levels"), py::arg("radius") = 1.0);
  m.def("make_box_subject", [](const std::array<double, 3>& size, double yaw) {
    return make_box_subject(Vec3(size[0], size[1], size[2]), yaw);
  }, py::arg("size"), py::arg("yaw_deg") = 45.0);
  m.def("make_box_template", &make_box_template, py::arg("divisions") = 16, py::arg("yaw_deg") = 45.0);
  m.def("make_humanoid", [](std::optional<std::uint64_t> seed) {
    return make_humanoid(seed ? sampled_subject_params(*seed) : bundled_subject_params()).mesh;
  }, py::arg("seed") = py::none(), "Bundled subject, or a sampled one for a given seed.");
  m.def("make_humanoid_template", []() { return make_humanoid_template(); });

  m.def("segment_names", []() {
    std::vector<std::string> out;
    for (auto l : kBodySegments) out.emplace_back(label_name(l));
    return out;
  });
  m.def("label_color", [](const std::string& name) { return label_color(label_arg(name)); }, py::arg("segment"));

  m.def("rve", &rve, py::arg("v_est"), py::arg("v_gt"));
  m.def("accuracy", &accuracy, py::arg("rve_percent"));
  m.def("rme", &rme, py::arg("v_est"), py::arg("real_mass"), py::arg("density") = kBodyDensity);

  m.def("statistical_outlier_removal", [](const Points& pts, std::size_t k, double ratio) {
    LabeledPointCloud c;
    c.points = to_points(pts, "points");
    return from_points(statistical_outlier_removal(c, {k, ratio}).points);
  }, py::arg("points"), py::arg("neighbors") = 600, py::arg("std_ratio") = 0.05);

  m.def("register_mesh",
        [](const TriangleMesh& tmpl, const Points& pts, double alpha, double correspondence_weight,
           std::optional<std::vector<std::pair<std::string, int>>> schedule) {
          RegistrationConfig cfg;
          cfg.regularization_alpha = alpha;
          cfg.correspondence_weight = correspondence_weight;
          if (schedule) cfg.schedule = schedule_arg(*schedule);
          LabeledPointCloud c;
          c.points = to_points(pts, "points");
          RegistrationResult r;
          {
            py::gil_scoped_release release;
            r = register_mesh(tmpl, c, cfg);
          }
          py::list log;
          for (const auto& it : r.log) {
            py::dict d;
            d["iteration"] = it.iteration;
            d["phase"] = std::string(direction_name(it.phase));
            d["correspondences"] = it.correspondences;
            d["objective"] = it.energy.objective();
            d["max_edge_distortion"] = it.max_edge_distortion;
            log.append(d);
          }
          return py::make_tuple(r.mesh, log);
        },
        py::arg("template"), py::arg("points"), py::arg("alpha") = 1e6, py::arg("correspondence_weight") = 1e8,
        py::arg("schedule") = py::none(),
        "Fits an aligned template to a point cloud; returns (mesh, per-iteration log).");

  m.def("run_end_to_end",
        [](const TriangleMesh& gt, const TriangleMesh& tmpl, const std::string& condition, std::uint64_t seed,
           bool clean) {
          PipelineConfig c;
          c.condition = condition_arg(condition);
          c.clean = clean;
          VolumeReport r;
          {
            py::gil_scoped_release release;
            r = run_end_to_end(gt, tmpl, c, seed);
          }
          return report_dict(r);
        },
        py::arg("ground_truth"), py::arg("template"), py::arg("condition") = "noer", py::arg("seed") = 1,
        py::arg("clean") = false, "Simulate two views, register and measure; returns the volume report.");

  m.def("run_seed", [](std::uint64_t seed, const std::string& subject, const std::string& condition, int k) {
    return run_seed(seed, subject, condition_arg(condition), k);
  }, py::arg("seed"), py::arg("subject"), py::arg("condition"), py::arg("k") = 0);

  m.attr("__version__") = BSV_VERSION;
}
