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

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <vector>

#include "buol/errors.hpp"
#include "buol/lifting.hpp"
#include "buol/priors.hpp"
#include "buol/rng.hpp"
#include "buol/synth.hpp"
#include "helpers.hpp"

using namespace buol;
using namespace buol::testing;

namespace {

// Random soft semantics (rows sum to one), depths mixing empty pixels, exact
// plane centers and arbitrary values, and occupancy in [0, 1].
struct RandomPriors {
  SemanticMap2D semantics;
  DepthMap depth;
  MultiPlaneOccupancy occupancy;
};

RandomPriors random_priors(Rng& rng, const Grid& g, int categories) {
  const int w = g.camera().width, h = g.camera().height;
  const DepthPlanes& p = g.planes();
  RandomPriors r{SemanticMap2D(w, h, categories), DepthMap(w, h),
                 MultiPlaneOccupancy(w, h, p.count)};
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      double sum = 0;
      for (int c = 0; c < categories; ++c) sum += r.semantics.at(u, v, c) = rng.uniform();
      for (int c = 0; c < categories; ++c) r.semantics.at(u, v, c) /= sum;
      const int kind = rng.uniform_int(0, 2);
      if (kind == 1) r.depth.at(u, v) = p.center(rng.uniform_int(0, p.count - 1));
      if (kind == 2) r.depth.at(u, v) = p.z_near + (p.z_far - p.z_near) * rng.uniform();
      for (int m = 0; m < p.count; ++m) r.occupancy.at(u, v, m) = rng.uniform();
    }
  }
  return r;
}

InstanceMask2D masks_of(const SceneGT& s) { return derive_instances2d(s); }

// Channel contents as a sorted list of per-channel cell sets.
std::vector<std::vector<std::int64_t>> channel_sets(const FeatureVolume& f) {
  std::vector<std::vector<std::int64_t>> sets(f.channels);
  for (std::int64_t i = 0; i < f.grid.cell_count(); ++i) {
    for (int c = 0; c < f.channels; ++c) {
      if (f.cell(i)[c] != 0.0f) sets[c].push_back(i);
    }
  }
  std::sort(sets.begin(), sets.end());
  return sets;
}

}  // namespace

TEST_SUITE("lifting") {

TEST_CASE("lift_semantics with the surface at plane 5") {
  const Grid g = small_grid();
  SemanticMap2D s(12, 10, 4);
  DepthMap d(12, 10);
  s.at(6, 4, 2) = 1.0;
  d.at(6, 4) = g.planes().center(5);
  const FeatureVolume f = lift_semantics(s, d, g);
  for (int m = 0; m < 16; ++m) {
    const auto cell = f.cell(g.extent().index(6, 4, m));
    CHECK(cell[2] == (m >= 5 ? 1.0f : 0.0f));
    CHECK(cell[0] == 0.0f);
  }
  std::int64_t nonzero = 0;
  for (float x : f.features) nonzero += x != 0.0f;
  CHECK(nonzero == 11);
}

TEST_CASE("lift_semantics with no surface is empty") {
  const Grid g = small_grid();
  SemanticMap2D s(12, 10, 3, 1.0 / 3);
  const FeatureVolume f = lift_semantics(s, DepthMap(12, 10), g);
  for (float x : f.features) CHECK(x == 0.0f);
  for (float x : f.occupancy) CHECK(x == 0.0f);
}

TEST_CASE("lift_semantics column sums") {
  const Grid g = small_grid();
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(seed, 9);
    const RandomPriors r = random_priors(rng, g, 5);
    const FeatureVolume f = lift_semantics(r.semantics, r.depth, g);
    for (int v = 0; v < 10; ++v) {
      for (int u = 0; u < 12; ++u) {
        const double d = r.depth.at(u, v);
        int lit = 0;
        for (int m = 0; m < 16; ++m) lit += d > 0 && g.planes().center(m) >= d;
        if (d > 0) {
          const auto idx = plane_index(d, g.planes());
          // At an exact plane center both counts agree.
          if (g.planes().center(*idx) == d) CHECK(lit == 16 - *idx);
        }
        for (int c = 0; c < 5; ++c) {
          double sum = 0;
          for (int m = 0; m < 16; ++m) sum += f.cell(g.extent().index(u, v, m))[c];
          CHECK(sum == doctest::Approx(lit * static_cast<float>(r.semantics.at(u, v, c)))
                           .epsilon(1e-6));
        }
      }
    }
  }
}

TEST_CASE("lift shape errors") {
  const Grid g = small_grid();
  CHECK_THROWS_AS(lift_semantics(SemanticMap2D(11, 10, 3), DepthMap(12, 10), g),
                  ShapeError);
  CHECK_THROWS_AS(lift_semantics(SemanticMap2D(12, 10, 3), DepthMap(12, 9), g),
                  ShapeError);
  CHECK_THROWS_AS(lift_occupancy(MultiPlaneOccupancy(12, 10, 15), DepthMap(12, 10), g),
                  ShapeError);
}

TEST_CASE("lift_occupancy of ground truth equals scene occupancy") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const SceneGT s = generate_scene(small_scene_config(seed));
    const std::vector<float> o =
        lift_occupancy(derive_multiplane_occupancy(s), derive_depth(s), s.grid);
    for (std::int64_t i = 0; i < s.grid.cell_count(); ++i) {
      CHECK(o[i] == (s.occupied(i) ? 1.0f : 0.0f));
    }
  }
}

TEST_CASE("lift_occupancy constant inputs") {
  const Grid g = small_grid();
  const DepthMap near(12, 10, 1, g.planes().center(0));
  const std::vector<float> ones =
      lift_occupancy(MultiPlaneOccupancy(12, 10, 16, 1.0), near, g);
  for (float x : ones) CHECK(x == 1.0f);
  const std::vector<float> zeros =
      lift_occupancy(MultiPlaneOccupancy(12, 10, 16, 0.0), near, g);
  for (float x : zeros) CHECK(x == 0.0f);
}

TEST_CASE("occupancy_aware_lift of ground truth matches the scene") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const SceneGT s = generate_scene(small_scene_config(seed));
    const Priors2D p = derive_priors(s);
    const FeatureVolume f = occupancy_aware_lift(p.semantics, p.occupancy, p.depth, s.grid);
    const int c_count = s.categories.size();
    for (std::int64_t i = 0; i < s.grid.cell_count(); ++i) {
      const auto cell = f.cell(i);
      for (int c = 0; c < c_count; ++c) {
        const bool hot = s.occupied(i) && c == s.semantic[i];
        CHECK(cell[c] == (hot ? 1.0f : 0.0f));
      }
    }
  }
}

TEST_CASE("occupancy_aware_lift zero and half occupancy") {
  const Grid g = small_grid();
  Rng rng(4, 4);
  RandomPriors r = random_priors(rng, g, 4);
  std::fill(r.occupancy.data.begin(), r.occupancy.data.end(), 1.0);
  const FeatureVolume full = occupancy_aware_lift(r.semantics, r.occupancy, r.depth, g);
  std::fill(r.occupancy.data.begin(), r.occupancy.data.end(), 0.5);
  const FeatureVolume half = occupancy_aware_lift(r.semantics, r.occupancy, r.depth, g);
  for (std::size_t i = 0; i < full.features.size(); ++i) {
    CHECK(half.features[i] == 0.5f * full.features[i]);
  }
  std::fill(r.occupancy.data.begin(), r.occupancy.data.end(), 0.0);
  const FeatureVolume zero = occupancy_aware_lift(r.semantics, r.occupancy, r.depth, g);
  for (float x : zero.features) CHECK(x == 0.0f);
}

TEST_CASE("occupancy_aware_lift transform hook") {
  const Grid g = small_grid();
  Rng rng(8, 8);
  const RandomPriors r = random_priors(rng, g, 4);
  const FeatureVolume plain = occupancy_aware_lift(r.semantics, r.occupancy, r.depth, g);

  // Explicit identity hooks take the unfused path and must agree.
  LiftTransforms identity;
  identity.semantic = [](FeatureVolume&) {};
  identity.occupancy = [](std::vector<float>&, const Grid&) {};
  const FeatureVolume unfused =
      occupancy_aware_lift(r.semantics, r.occupancy, r.depth, g, identity);
  CHECK(unfused.occupancy == plain.occupancy);
  for (std::size_t i = 0; i < plain.features.size(); ++i) {
    CHECK(unfused.features[i] == doctest::Approx(plain.features[i]).epsilon(1e-6));
  }

  LiftTransforms twice;
  twice.semantic = [](FeatureVolume& f) {
    for (float& x : f.features) x *= 2.0f;
  };
  const FeatureVolume doubled =
      occupancy_aware_lift(r.semantics, r.occupancy, r.depth, g, twice);
  for (std::size_t i = 0; i < plain.features.size(); ++i) {
    CHECK(doubled.features[i] == doctest::Approx(2.0f * plain.features[i]).epsilon(1e-6));
  }

  LiftTransforms broken;
  broken.occupancy = [](std::vector<float>& o, const Grid&) { o.pop_back(); };
  CHECK_THROWS_AS(occupancy_aware_lift(r.semantics, r.occupancy, r.depth, g, broken),
                  ShapeError);
}

TEST_CASE("free space is exactly zero and masking never raises a feature") {
  const Grid g = small_grid();
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed, 21);
    const RandomPriors r = random_priors(rng, g, 3);
    const FeatureVolume sem = lift_semantics(r.semantics, r.depth, g);
    const FeatureVolume both = occupancy_aware_lift(r.semantics, r.occupancy, r.depth, g);
    const std::vector<float> occ = lift_occupancy(r.occupancy, r.depth, g);
    for (std::int64_t i = 0; i < g.cell_count(); ++i) {
      const CellIndex q = g.extent().cell(i);
      const double d = r.depth.at(q.x, q.y);
      const bool free = !(d > 0) || g.planes().center(q.z) < d;
      for (int c = 0; c < 3; ++c) {
        if (free) {
          CHECK(sem.cell(i)[c] == 0.0f);
          CHECK(both.cell(i)[c] == 0.0f);
        }
        CHECK(both.cell(i)[c] <= sem.cell(i)[c]);
      }
      if (free) CHECK(occ[i] == 0.0f);
    }
  }
}

TEST_CASE("bottom-up lift ignores instance enumeration") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const SceneGT s = generate_scene(small_scene_config(seed));
    // Reverse the instance ids.
    SceneGT t = s;
    std::uint32_t top = 0;
    for (std::uint32_t id : s.instance) top = std::max(top, id);
    for (std::uint32_t& id : t.instance) {
      if (id != 0) id = top + 1 - id;
    }
    const Priors2D a = derive_priors(s), b = derive_priors(t);
    CHECK(occupancy_aware_lift(a.semantics, a.occupancy, a.depth, s.grid) ==
          occupancy_aware_lift(b.semantics, b.occupancy, b.depth, t.grid));
  }
}

TEST_CASE("axis-aligned lift samples the nearest pixel") {
  const Grid f = small_grid();
  const Grid a(axis_frame_enclosing_frustum(f.camera(), f.planes(), 0.25),
               f.camera(), f.planes());
  Rng rng(2, 2);
  const RandomPriors r = random_priors(rng, f, 3);
  const FeatureVolume sem = lift_semantics(r.semantics, r.depth, a);
  const std::vector<float> occ = lift_occupancy(r.occupancy, r.depth, a);
  for (std::int64_t i = 0; i < a.cell_count(); ++i) {
    const Point3 p = a.cell_center(a.extent().cell(i));
    std::vector<float> want(3, 0.0f);
    float want_occ = 0.0f;
    if (p.z > 0) {
      const PixelDepth q = project(p, f.camera());
      const int iu = static_cast<int>(std::floor(q.u + 0.5));
      const int iv = static_cast<int>(std::floor(q.v + 0.5));
      if (iu >= 0 && iu < 12 && iv >= 0 && iv < 10) {
        const double d = r.depth.at(iu, iv);
        if (d > 0 && p.z >= d) {
          for (int c = 0; c < 3; ++c) want[c] = static_cast<float>(r.semantics.at(iu, iv, c));
          const auto m = plane_index(p.z, f.planes());
          if (m) want_occ = static_cast<float>(r.occupancy.at(iu, iv, *m));
        }
      }
    }
    for (int c = 0; c < 3; ++c) CHECK(sem.cell(i)[c] == want[c]);
    CHECK(occ[i] == want_occ);
  }
}

TEST_CASE("top-down lift of one instance fills only the surface") {
  const Grid g = small_grid();
  InstanceMask2D masks{Raster<std::uint32_t>(12, 10), {{7, 3}}};
  DepthMap d(12, 10);
  for (int v = 2; v < 5; ++v) {
    for (int u = 3; u < 6; ++u) {
      masks.ids.at(u, v) = 7;
      d.at(u, v) = g.planes().center(4 + u - 3);
    }
  }
  const TopDownLift t =
      lift_instances_topdown(masks, d, g, ChannelAssignment::category_sorted(), 4);
  CHECK(t.warnings.empty());
  CHECK(t.channel_instance == std::vector<std::uint32_t>{7, 0, 0, 0});
  for (std::int64_t i = 0; i < g.cell_count(); ++i) {
    const CellIndex q = g.extent().cell(i);
    const bool surface = masks.ids.at(q.x, q.y) == 7 && q.z == 4 + q.x - 3;
    CHECK(t.volume.cell(i)[0] == (surface ? 1.0f : 0.0f));
    for (int c = 1; c < 4; ++c) CHECK(t.volume.cell(i)[c] == 0.0f);
  }
  CHECK_THROWS_AS(
      lift_instances_topdown(masks, d, g, ChannelAssignment::category_sorted(), 0),
      DomainError);
}

TEST_CASE("top-down random assignment permutes channels") {
  const SceneGT s = generate_scene(small_scene_config(3));
  const InstanceMask2D masks = masks_of(s);
  const DepthMap d = derive_depth(s);
  REQUIRE(masks.category_of.size() >= 2);
  const TopDownLift base =
      lift_instances_topdown(masks, d, s.grid, ChannelAssignment::random(0), 8);
  const auto base_sets = channel_sets(base.volume);
  bool differs = false;
  for (std::uint64_t seed = 1; seed < 20; ++seed) {
    const TopDownLift t =
        lift_instances_topdown(masks, d, s.grid, ChannelAssignment::random(seed), 8);
    CHECK(channel_sets(t.volume) == base_sets);
    CHECK(t.volume.occupancy == base.volume.occupancy);
    differs |= t.volume.features != base.volume.features;
  }
  CHECK(differs);
}

TEST_CASE("category-sorted assignment ignores id enumeration across categories") {
  const Grid g = small_grid();
  DepthMap d(12, 10, 1, g.planes().center(6));
  InstanceMask2D a{Raster<std::uint32_t>(12, 10), {{1, 5}, {2, 3}, {3, 4}}};
  InstanceMask2D b{Raster<std::uint32_t>(12, 10), {{3, 5}, {1, 3}, {2, 4}}};
  const std::map<std::uint32_t, std::uint32_t> a_to_b{{1, 3}, {2, 1}, {3, 2}};
  for (int v = 0; v < 10; ++v) {
    for (int u = 0; u < 12; ++u) {
      const std::uint32_t id = static_cast<std::uint32_t>((u / 4) + 1);
      a.ids.at(u, v) = id;
      b.ids.at(u, v) = a_to_b.at(id);
    }
  }
  const auto ta = lift_instances_topdown(a, d, g, ChannelAssignment::category_sorted(), 3);
  const auto tb = lift_instances_topdown(b, d, g, ChannelAssignment::category_sorted(), 3);
  CHECK(ta.volume == tb.volume);
  // Channels follow category order: 3, 4, 5.
  CHECK(ta.channel_instance == std::vector<std::uint32_t>{2, 3, 1});
}

TEST_CASE("top-down overflow keeps the largest instances") {
  const Grid g = small_grid();
  DepthMap d(12, 10, 1, g.planes().center(2));
  InstanceMask2D m{Raster<std::uint32_t>(12, 10), {{1, 3}, {2, 3}, {3, 3}}};
  for (int v = 0; v < 10; ++v) {
    for (int u = 0; u < 12; ++u) {
      // Areas: id 1 -> 10, id 2 -> 50, id 3 -> 60.
      m.ids.at(u, v) = u < 1 ? 1 : (u < 6 ? 2 : 3);
    }
  }
  const auto t = lift_instances_topdown(m, d, g, ChannelAssignment::category_sorted(), 2);
  REQUIRE(t.warnings.size() == 1);
  CHECK(t.warnings[0].find("dropped ids 1") != std::string::npos);
  CHECK(t.channel_instance == std::vector<std::uint32_t>{2, 3});
  CHECK(t.volume.occupancy[g.extent().index(0, 0, 2)] == 0.0f);
  CHECK(t.volume.occupancy[g.extent().index(3, 0, 2)] == 1.0f);
}

}  // TEST_SUITE
