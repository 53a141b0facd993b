// Copyright 2026 The buol Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Python bindings. Volumes cross the boundary as numpy arrays of shape
// (ny, nx, nz), images as (height, width[, channels]); everything is copied.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "buol/errors.hpp"
#include "buol/geometry.hpp"
#include "buol/io.hpp"
#include "buol/lifting.hpp"
#include "buol/losses.hpp"
#include "buol/metrics.hpp"
#include "buol/parallel.hpp"
#include "buol/pipeline.hpp"
#include "buol/priors.hpp"
#include "buol/synth.hpp"

namespace py = pybind11;
using namespace buol;

namespace {

template <typename T>
py::array_t<T> to_array(const std::vector<T>& values,
                        std::vector<py::ssize_t> shape) {
  py::array_t<T> out(shape);
  std::copy(values.begin(), values.end(), out.mutable_data());
  return out;
}

std::vector<py::ssize_t> volume_shape(const Grid& g) {
  const Extent& e = g.extent();
  return {e.ny, e.nx, e.nz};
}

template <typename R>
py::array_t<double> image_array(const R& r) {
  if (r.channels == 1) return to_array(r.data, {r.height, r.width});
  return to_array(r.data, {r.height, r.width, r.channels});
}

// Copies a C-contiguous double array into a raster, checking its shape.
template <typename R>
R raster_from(const py::array_t<double, py::array::c_style | py::array::forcecast>& a,
              int width, int height, int channels, const char* what) {
  const bool shape_ok =
      (a.ndim() == 2 && channels == 1 && a.shape(0) == height &&
       a.shape(1) == width) ||
      (a.ndim() == 3 && a.shape(0) == height && a.shape(1) == width &&
       a.shape(2) == channels);
  if (!shape_ok) throw ShapeError(std::string(what) + ": unexpected array shape");
  R r(width, height, channels);
  std::copy(a.data(), a.data() + a.size(), r.data.begin());
  return r;
}

py::dict quality(const QualityTriple& q) {
  py::dict d;
  d["prq"] = q.prq;
  d["rsq"] = q.rsq;
  d["rrq"] = q.rrq;
  d["categories"] = q.categories;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bottom-up panoptic 3D reconstruction core";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ShapeError>(m, "ShapeError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<PlacementError>(m, "PlacementError", PyExc_RuntimeError);

  m.def("set_thread_count", &set_thread_count, py::arg("threads"));
  m.def("thread_count", &thread_count);

  py::class_<CameraIntrinsics>(m, "CameraIntrinsics")
      .def(py::init([](double fx, double fy, double cx, double cy, int w, int h) {
             CameraIntrinsics k{fx, fy, cx, cy, w, h};
             k.validate();
             return k;
           }),
           py::arg("fx"), py::arg("fy"), py::arg("cx"), py::arg("cy"),
           py::arg("width"), py::arg("height"))
      .def_readonly("fx", &CameraIntrinsics::fx)
      .def_readonly("fy", &CameraIntrinsics::fy)
      .def_readonly("cx", &CameraIntrinsics::cx)
      .def_readonly("cy", &CameraIntrinsics::cy)
      .def_readonly("width", &CameraIntrinsics::width)
      .def_readonly("height", &CameraIntrinsics::height);

  py::class_<DepthPlanes>(m, "DepthPlanes")
      .def(py::init([](int count, double zn, double zf) {
             DepthPlanes p{count, zn, zf};
             p.validate();
             return p;
           }),
           py::arg("count") = 128, py::arg("z_near") = 0.4, py::arg("z_far") = 6.0)
      .def_readonly("count", &DepthPlanes::count)
      .def_readonly("z_near", &DepthPlanes::z_near)
      .def_readonly("z_far", &DepthPlanes::z_far)
      .def("center", &DepthPlanes::center);

  m.def("backproject",
        [](double u, double v, double z, const CameraIntrinsics& k) {
          const Point3 p = backproject(u, v, z, k);
          return py::make_tuple(p.x, p.y, p.z);
        },
        py::arg("u"), py::arg("v"), py::arg("z"), py::arg("camera"));
  m.def("project",
        [](double x, double y, double z, const CameraIntrinsics& k) {
          const PixelDepth q = project({x, y, z}, k);
          return py::make_tuple(q.u, q.v, q.z);
        },
        py::arg("x"), py::arg("y"), py::arg("z"), py::arg("camera"));
  m.def("plane_index", &plane_index, py::arg("z"), py::arg("planes"));

  py::class_<PanopticVolume>(m, "PanopticVolume")
      .def_property_readonly("shape", [](const PanopticVolume& v) {
        return py::tuple(py::cast(volume_shape(v.grid)));
      })
      .def_property_readonly("semantic", [](const PanopticVolume& v) {
        return to_array(v.semantic, volume_shape(v.grid));
      })
      .def_property_readonly("instance", [](const PanopticVolume& v) {
        return to_array(v.instance, volume_shape(v.grid));
      })
      .def_property_readonly("camera", [](const PanopticVolume& v) { return v.grid.camera(); })
      .def_property_readonly("planes", [](const PanopticVolume& v) { return v.grid.planes(); })
      .def_property_readonly("thing_categories",
                             [](const PanopticVolume& v) { return v.categories.thing_ids(); })
      .def("occupied_count", &PanopticVolume::occupied_count)
      .def("validate", &validate_scene)
      .def("to_bytes", [](const PanopticVolume& v) {
        const auto b = encode_container(to_container(v));
        return py::bytes(reinterpret_cast<const char*>(b.data()), b.size());
      })
      .def_static("from_bytes", [](const py::bytes& data) {
        const std::string s = data;
        return panoptic_from(decode_container(std::span(
            reinterpret_cast<const std::uint8_t*>(s.data()), s.size())));
      })
      .def("__eq__", [](const PanopticVolume& a, const PanopticVolume& b) { return a == b; });

  m.def("generate_scene",
        [](std::uint64_t seed, int width, int height, int planes, int categories,
           int things, int stuff, double min_separation, bool allow_occlusion) {
          SynthConfig cfg;
          cfg.seed = seed;
          cfg.width = width;
          cfg.height = height;
          cfg.planes = planes;
          cfg.categories = categories;
          cfg.things = things;
          cfg.stuff = stuff;
          cfg.min_separation = min_separation;
          cfg.allow_occlusion = allow_occlusion;
          return generate_scene(cfg);
        },
        py::arg("seed") = 0, py::arg("width") = 64, py::arg("height") = 64,
        py::arg("planes") = 64, py::arg("categories") = 11, py::arg("things") = 4,
        py::arg("stuff") = 2, py::arg("min_separation") = 6.0,
        py::arg("allow_occlusion") = false);

  m.def("derive_priors",
        [](const SceneGT& scene, double sigma) {
          const Priors2D p = derive_priors(scene, sigma);
          py::dict d;
          d["depth"] = image_array(p.depth);
          d["semantics"] = image_array(p.semantics);
          d["heatmap"] = image_array(p.heatmap);
          d["occupancy"] = image_array(p.occupancy);
          py::list centers;
          for (const InstanceCenter& c : p.centers) {
            centers.append(py::make_tuple(c.u, c.v, c.category, c.instance_id));
          }
          d["centers"] = centers;
          return d;
        },
        py::arg("scene"), py::arg("sigma") = kDefaultHeatmapSigma);

  m.def("occupancy_aware_lift",
        [](py::array_t<double, py::array::c_style | py::array::forcecast> semantics,
           py::array_t<double, py::array::c_style | py::array::forcecast> occupancy,
           py::array_t<double, py::array::c_style | py::array::forcecast> depth,
           const CameraIntrinsics& camera, const DepthPlanes& planes) {
          if (semantics.ndim() != 3) throw ShapeError("semantics must be (H, W, C)");
          const int w = camera.width, h = camera.height;
          const auto c = static_cast<int>(semantics.shape(2));
          const auto s = raster_from<SemanticMap2D>(semantics, w, h, c, "semantics");
          const auto o = raster_from<MultiPlaneOccupancy>(occupancy, w, h,
                                                          planes.count, "occupancy");
          const auto d = raster_from<DepthMap>(depth, w, h, 1, "depth");
          const Grid grid(camera, planes);
          const FeatureVolume f = occupancy_aware_lift(s, o, d, grid);
          auto shape = volume_shape(grid);
          py::array_t<float> occ = to_array(f.occupancy, shape);
          shape.push_back(c);
          return py::make_tuple(to_array(f.features, shape), occ);
        },
        py::arg("semantics"), py::arg("occupancy"), py::arg("depth"),
        py::arg("camera"), py::arg("planes"));

  m.def("oracle_reconstruction", &oracle_reconstruction, py::arg("scene"));

  m.def("prq",
        [](const PanopticVolume& pred, const PanopticVolume& gt, double threshold,
           const std::string& matching) {
          MatchPolicy policy = MatchPolicy::kOptimal;
          if (matching == "greedy") {
            policy = MatchPolicy::kGreedy;
          } else if (matching != "optimal") {
            throw DomainError("matching must be 'optimal' or 'greedy'");
          }
          const PrqReport r = prq(pred, gt, threshold, policy);
          py::dict d;
          d["all"] = quality(r.all);
          d["things"] = quality(r.things);
          d["stuff"] = quality(r.stuff);
          py::list per;
          for (const CategoryQuality& q : r.per_category) {
            py::dict c;
            c["category"] = q.category;
            c["thing"] = q.thing;
            c["prq"] = q.prq;
            c["rsq"] = q.rsq;
            c["rrq"] = q.rrq;
            c["tp"] = q.tp;
            c["fp"] = q.fp;
            c["fn"] = q.fn;
            per.append(c);
          }
          d["per_category"] = per;
          return d;
        },
        py::arg("pred"), py::arg("gt"), py::arg("threshold") = 0.25,
        py::arg("matching") = "optimal");

  m.def("tsdf",
        [](const SceneGT& scene, double truncation) {
          return to_array(tsdf_from_scene(scene, truncation), volume_shape(scene.grid));
        },
        py::arg("scene"), py::arg("truncation") = kDefaultTruncation);
}
