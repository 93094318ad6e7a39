#include <array>
#include <sstream>
#include <string>
#include <vector>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cli.hpp"
#include "memsim/dataset.hpp"
#include "memsim/error.hpp"
#include "memsim/eval.hpp"
#include "memsim/scanpattern.hpp"
#include "memsim/scene_io.hpp"
#include "memsim/sensor.hpp"

namespace py = pybind11;
using namespace memsim;

namespace {

using BoxTuple = std::array<double, 7>;  // x, y, z, dx, dy, dz, yaw

Box3D to_box(const BoxTuple& b) { return {{b[0], b[1], b[2]}, b[3], b[4], b[5], b[6]}; }

py::array_t<double> points_array(const PointCloudFrame& cloud) {
  py::array_t<double> out({static_cast<py::ssize_t>(cloud.points.size()), py::ssize_t{4}});
  auto m = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    const auto& p = cloud.points[i];
    m(i, 0) = p.x;
    m(i, 1) = p.y;
    m(i, 2) = p.z;
    m(i, 3) = p.intensity;
  }
  return out;
}

PointCloudFrame points_from(const py::array_t<double, py::array::c_style | py::array::forcecast>& a,
                            FrameConvention convention) {
  if (a.ndim() != 2 || a.shape(1) != 4) throw ValidationError("points must be an (N, 4) array");
  PointCloudFrame f;
  f.convention = convention;
  const auto r = a.unchecked<2>();
  for (py::ssize_t i = 0; i < r.shape(0); ++i) f.points.push_back({r(i, 0), r(i, 1), r(i, 2), r(i, 3)});
  return f;
}

py::dict label_dict(const Label& l) {
  py::dict d;
  d["box"] = BoxTuple{l.box.center.x, l.box.center.y, l.box.center.z, l.box.dx, l.box.dy, l.box.dz, l.box.yaw};
  d["cls"] = l.cls;
  d["object_id"] = l.object_id;
  d["num_points"] = l.num_points;
  return d;
}

py::dict frame_dict(const AnnotatedFrame& f) {
  py::dict d;
  d["points"] = points_array(f.cloud);
  d["provenance"] = f.cloud.provenance;
  d["sample_index"] = f.cloud.sample_index;
  py::list labels;
  for (const auto& l : f.labels) labels.append(label_dict(l));
  d["labels"] = labels;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "MEMS-LiDAR scene simulation, dataset tooling and detection evaluation";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_RuntimeError);

  m.def(
      "scan_directions",
      [](int num_scanlines, int points_per_line, double fov_h, double fov_v) {
        ScanConfig cfg;
        cfg.num_scanlines = num_scanlines;
        cfg.points_per_line = points_per_line;
        cfg.fov_h = fov_h;
        cfg.fov_v = fov_v;
        const auto dirs = generate_scan_directions(cfg);
        py::array_t<double> out({static_cast<py::ssize_t>(dirs.size()), py::ssize_t{2}});
        auto a = out.mutable_unchecked<2>();
        for (std::size_t i = 0; i < dirs.size(); ++i) {
          a(i, 0) = dirs[i].azimuth;
          a(i, 1) = dirs[i].elevation;
        }
        return out;
      },
      py::arg("num_scanlines") = 200, py::arg("points_per_line") = 100, py::arg("fov_h") = deg_to_rad(72.0),
      py::arg("fov_v") = deg_to_rad(30.0), "(azimuth, elevation) per sample in radians, shape (N, 2).");

  m.def(
      "intrinsics_from_fov",
      [](double fov_h, int width, int height) {
        const auto k = intrinsics_from_fov(fov_h, width, height);
        py::dict d;
        d["fx"] = k.fx;
        d["fy"] = k.fy;
        d["cx"] = k.cx;
        d["cy"] = k.cy;
        d["width"] = k.width;
        d["height"] = k.height;
        return d;
      },
      py::arg("fov_h"), py::arg("width"), py::arg("height"));

  m.def(
      "iou3d", [](const BoxTuple& a, const BoxTuple& b) { return iou3d(to_box(a), to_box(b)); }, py::arg("a"),
      py::arg("b"), "Boxes are (x, y, z, dx, dy, dz, yaw).");

  m.def(
      "average_precision",
      [](const std::vector<double>& confidences, const std::vector<bool>& true_positives, std::size_t total_gt,
         const std::string& mode) {
        if (confidences.size() != true_positives.size())
          throw ValidationError("confidences and true_positives differ in length");
        std::vector<ScoredDetection> dets;
        for (std::size_t i = 0; i < confidences.size(); ++i)
          dets.push_back({confidences[i], true_positives[i], 0.0, 0, i});
        return average_precision(dets, total_gt, ap_mode_from_string(mode));
      },
      py::arg("confidences"), py::arg("true_positives"), py::arg("total_gt"), py::arg("mode") = "exact-auc");

  m.def(
      "simulate_frame",
      [](const std::string& scene_json, double t, const std::string& path, int width, int height, int min_points) {
        const auto scene = scene_from_json(nlohmann::json::parse(scene_json));
        if (path == "direct") return frame_dict(simulate_frame_direct(scene, t, min_points));
        if (path == "depth") return frame_dict(simulate_frame_depthpath(scene, t, width, height, min_points));
        throw ValidationError("path must be 'direct' or 'depth', got '" + path + "'");
      },
      py::arg("scene_json"), py::arg("t") = 0.0, py::arg("path") = "direct", py::arg("width") = kDefaultDepthWidth,
      py::arg("height") = kDefaultDepthHeight, py::arg("min_points") = kDefaultMinPoints,
      "Simulates one frame of a scene script given as a JSON string.");

  m.def(
      "normalize",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& points, double height, double tilt) {
        const auto f = points_from(points, FrameConvention::SensorRaw);
        return points_array(normalize(f, {}, SensorMount{{0.0, 0.0, height}, tilt, 0.0}).cloud);
      },
      py::arg("points"), py::arg("height"), py::arg("tilt"), "Levels raw (N, 4) points; tilt in radians.");

  m.def(
      "denormalize",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& points, double height, double tilt) {
        const auto f = points_from(points, FrameConvention::Normalized);
        return points_array(denormalize(f, {}, SensorMount{{0.0, 0.0, height}, tilt, 0.0}).cloud);
      },
      py::arg("points"), py::arg("height"), py::arg("tilt"));

  m.def("rounded_share", &rounded_share, py::arg("fraction"), py::arg("n"));

  m.def(
      "run_cli",
      [](std::vector<std::string> args) {
        args.insert(args.begin(), "memsim");
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release release;
          code = cli::run(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs a memsim subcommand; returns (exit_code, stdout, stderr).");
}
