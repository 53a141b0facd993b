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

#include <doctest.h>

#include <cmath>

#include "buol/errors.hpp"
#include "buol/geometry.hpp"
#include "buol/resample.hpp"
#include "buol/rng.hpp"
#include "buol/synth.hpp"
#include "helpers.hpp"

using namespace buol;
using namespace buol::testing;

TEST_SUITE("geometry") {

TEST_CASE("backproject examples") {
  const CameraIntrinsics k{500, 480, 319.5, 239.5, 640, 480};
  const Point3 p = backproject(k.cx, k.cy, 2.0, k);
  CHECK(p == Point3{0, 0, 2});
  const CameraIntrinsics unit{1, 1, 0, 0, 2, 2};
  CHECK(backproject(1, 0, 1, unit) == Point3{1, 0, 1});
  CHECK_THROWS_AS(backproject(1, 1, 0.0, unit), DomainError);
  CHECK_THROWS_AS(backproject(1, 1, -1.0, unit), DomainError);
}

TEST_CASE("project examples") {
  const CameraIntrinsics k{500, 480, 319.5, 239.5, 640, 480};
  const PixelDepth q = project({0, 0, 2}, k);
  CHECK(q.u == k.cx);
  CHECK(q.v == k.cy);
  CHECK(q.z == 2.0);
  const CameraIntrinsics unit{1, 1, 0, 0, 2, 2};
  const PixelDepth r = project({1, 0, 1}, unit);
  CHECK(r.u == 1.0);
  CHECK(r.v == 0.0);
  CHECK_THROWS_AS(project({1, 1, 0}, unit), DomainError);
}

TEST_CASE("project inverts backproject on random samples") {
  Rng rng(11, 1);
  for (int i = 0; i < 1000; ++i) {
    const CameraIntrinsics k{50 + 900 * rng.uniform(), 50 + 900 * rng.uniform(),
                             0, 0, 640, 480};
    CameraIntrinsics kk = k;
    kk.cx = 640 * rng.uniform();
    kk.cy = 480 * rng.uniform();
    const double u = -100 + 840 * rng.uniform(), v = -100 + 680 * rng.uniform();
    const double z = 0.4 + 5.6 * rng.uniform();
    const PixelDepth q = project(backproject(u, v, z, kk), kk);
    CHECK(std::abs(q.u - u) <= 1e-9 * std::max(1.0, std::abs(u)));
    CHECK(std::abs(q.v - v) <= 1e-9 * std::max(1.0, std::abs(v)));
    CHECK(std::abs(q.z - z) <= 1e-9 * z);
  }
}

TEST_CASE("intrinsics and planes validation") {
  CHECK_THROWS_AS((CameraIntrinsics{0, 1, 0, 0, 1, 1}.validate()), DomainError);
  CHECK_THROWS_AS((CameraIntrinsics{1, 1, 2, 0, 2, 2}.validate()), DomainError);
  CHECK_THROWS_AS((CameraIntrinsics{1, 1, 0, 0, 0, 2}.validate()), DomainError);
  CHECK_NOTHROW((CameraIntrinsics{1, 1, 0, 0, 1, 1}.validate()));
  CHECK_THROWS_AS((DepthPlanes{0, 0.4, 6}.validate()), DomainError);
  CHECK_THROWS_AS((DepthPlanes{4, 0.0, 6}.validate()), DomainError);
  CHECK_THROWS_AS((DepthPlanes{4, 2.0, 2.0}.validate()), DomainError);
}

TEST_CASE("plane_index examples") {
  const DepthPlanes p{128, 0.4, 6.0};
  CHECK(plane_index(p.z_near, p) == 0);
  CHECK(plane_index(p.z_near + 0.5 * (p.z_far - p.z_near), p) == 64);
  CHECK_FALSE(plane_index(p.z_far, p).has_value());
  CHECK_FALSE(plane_index(0.39, p).has_value());
  CHECK(plane_index(std::nextafter(p.z_far, 0.0), p) == 127);
}

TEST_CASE("plane_index recovers every plane center") {
  for (int m_count : {1, 7, 32, 64, 128, 255}) {
    const DepthPlanes p{m_count, 0.4, 6.0};
    double prev = -1.0;
    for (int m = 0; m < m_count; ++m) {
      CHECK(plane_index(p.center(m), p) == m);
      CHECK(p.center(m) > prev);
      prev = p.center(m);
    }
  }
}

TEST_CASE("plane_index is monotone in z") {
  const DepthPlanes p{64, 0.4, 6.0};
  int last = 0;
  for (double z = 0.4; z < 6.0; z += 0.001) {
    const int m = *plane_index(z, p);
    CHECK(m >= last);
    last = m;
  }
}

TEST_CASE("first plane at or behind a depth") {
  const DepthPlanes p{8, 1.0, 9.0};  // centers 1.5, 2.5, ...
  CHECK(first_plane_at_or_behind(1.5, p) == 0);
  CHECK(first_plane_at_or_behind(1.6, p) == 1);
  CHECK(first_plane_at_or_behind(0.2, p) == 0);
  CHECK(first_plane_at_or_behind(8.6, p) == 8);
  // Brute force over a fine sweep.
  for (double z = 0.5; z < 9.5; z += 0.01) {
    int expect = 0;
    while (expect < p.count && p.center(expect) < z) ++expect;
    CHECK(first_plane_at_or_behind(z, p) == expect);
  }
}

TEST_CASE("round half up") {
  CHECK(round_half_up(2.5) == 3);
  CHECK(round_half_up(-2.5) == -2);
  CHECK(round_half_up(2.4999) == 2);
  CHECK(round_half_up(-0.5) == 0);
}

TEST_CASE("grid frames") {
  const CameraIntrinsics k = small_camera();
  const DepthPlanes p = small_planes();
  CHECK_THROWS_AS(Grid(FrustumFrame{11, 10, 16}, k, p), ShapeError);
  CHECK_THROWS_AS(Grid(FrustumFrame{12, 10, 15}, k, p), ShapeError);
  CHECK_THROWS_AS(Grid(AxisFrame{{0, 1, 1}, 0.1, {}}, k, p), DomainError);
  CHECK_THROWS_AS(Grid(AxisFrame{{1, 1, 1}, 0.0, {}}, k, p), DomainError);
  const Grid f(k, p);
  CHECK(f.is_frustum());
  CHECK(f.cell_count() == 12 * 10 * 16);
  // Frustum cell centers sit on the pixel ray at the plane center depth.
  const Point3 c = f.cell_center({3, 4, 5});
  const PixelDepth q = project(c, k);
  CHECK(q.u == doctest::Approx(3).epsilon(1e-12));
  CHECK(q.v == doctest::Approx(4).epsilon(1e-12));
  CHECK(q.z == doctest::Approx(p.center(5)));
  CHECK(f.locate(c) == CellIndex{3, 4, 5});

  const Grid a(AxisFrame{{4, 3, 2}, 0.5, {-1.0, -0.75, 1.0}}, k, p);
  CHECK_FALSE(a.is_frustum());
  CHECK(a.cell_center({0, 0, 0}) == Point3{-0.75, -0.5, 1.25});
  CHECK(a.locate({-0.75, -0.5, 1.25}) == CellIndex{0, 0, 0});
  CHECK(a.locate({0.99, 0.74, 1.99}) == CellIndex{3, 2, 1});
  CHECK_FALSE(a.locate({1.0, 0.0, 1.5}).has_value());
}

TEST_CASE("extent layout keeps each ray contiguous") {
  const Extent e{5, 4, 3};
  std::int64_t expect = 0;
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 5; ++x) {
      for (int z = 0; z < 3; ++z) {
        CHECK(e.index(x, y, z) == expect);
        CHECK(e.cell(expect) == CellIndex{x, y, z});
        ++expect;
      }
    }
  }
}

TEST_CASE("axis frame encloses the frustum") {
  const CameraIntrinsics k = small_camera();
  const DepthPlanes p = small_planes();
  const Grid a(axis_frame_enclosing_frustum(k, p, 0.2), k, p);
  const Grid f(k, p);
  for (std::int64_t i = 0; i < f.cell_count(); ++i) {
    CHECK(a.locate(f.cell_center(f.extent().cell(i))).has_value());
  }
}

TEST_CASE("resample identity and camera mismatch") {
  Rng rng(5, 1);
  const Grid g = small_grid();
  const PanopticVolume v = random_volume(rng, g, 6, 0.3, 3);
  CHECK(resample_volume(v, g) == v);
  const Grid other(small_camera(12, 10), DepthPlanes{16, 0.5, 5.0});
  CHECK_THROWS_AS(resample_volume(v, other), ShapeError);
}

TEST_CASE("single voxel lands in the cell containing its center") {
  const CameraIntrinsics k = small_camera();
  const DepthPlanes p = small_planes();
  const Grid f(k, p);
  const Grid a(AxisFrame{{40, 40, 40}, 0.1, {-2.0, -2.0, 0.5}}, k, p);
  PanopticVolume src(a, CategoryTable::standard(4));
  const CellIndex cell{21, 18, 20};
  src.semantic[a.extent().index(cell.x, cell.y, cell.z)] = 1;
  const PanopticVolume dst = resample_volume(src, f);
  const Point3 center = a.cell_center(cell);
  // Every frustum cell labeled 1 has its center inside the source voxel.
  for (std::int64_t i = 0; i < f.cell_count(); ++i) {
    if (dst.semantic[i] == 0) continue;
    CHECK(a.locate(f.cell_center(f.extent().cell(i))) == cell);
  }
  // And the reverse direction: the voxel center lands in exactly one cell.
  PanopticVolume one(f, CategoryTable::standard(4));
  const CellIndex fc = *f.locate(center);
  one.semantic[f.extent().index(fc.x, fc.y, fc.z)] = 2;
  const PanopticVolume back = resample_volume(one, a);
  CHECK(back.semantic[a.extent().index(cell.x, cell.y, cell.z)] == 2);
}

TEST_CASE("frustum to axis to frustum preserves labels at 2x resolution") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const SceneGT scene = generate_scene(small_scene_config(seed));
    const Grid& f = scene.grid;
    // Smallest frustum cell extent over occupied cells, halved.
    double min_extent = 1e9;
    for (std::int64_t i = 0; i < f.cell_count(); ++i) {
      if (!scene.occupied(i)) continue;
      const CellIndex c = f.extent().cell(i);
      const double z = f.planes().center(c.z);
      min_extent = std::min({min_extent, z / f.camera().fx, z / f.camera().fy,
                             f.planes().spacing()});
    }
    const double voxel = 0.5 * min_extent;
    const Grid a(axis_frame_enclosing_frustum(f.camera(), f.planes(), voxel),
                 f.camera(), f.planes());
    const PanopticVolume back = resample_volume(resample_volume(scene, a), f);
    std::int64_t kept = 0, total = 0;
    for (std::int64_t i = 0; i < f.cell_count(); ++i) {
      if (!scene.occupied(i)) continue;
      ++total;
      kept += back.semantic[i] == scene.semantic[i] &&
              back.instance[i] == scene.instance[i];
    }
    CHECK(static_cast<double>(kept) / total >= 0.95);
  }
}

}  // TEST_SUITE
