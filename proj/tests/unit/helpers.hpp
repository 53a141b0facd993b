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

// Shared fixtures and hand-rolled generators for the unit tests.

#ifndef BUOL_TESTS_HELPERS_HPP_
#define BUOL_TESTS_HELPERS_HPP_

#include <cstdint>
#include <vector>

#include "buol/geometry.hpp"
#include "buol/rng.hpp"
#include "buol/synth.hpp"
#include "buol/volume.hpp"

namespace buol::testing {

inline CameraIntrinsics small_camera(int w = 12, int h = 10) {
  return {static_cast<double>(w), static_cast<double>(w), (w - 1) / 2.0,
          (h - 1) / 2.0, w, h};
}

inline DepthPlanes small_planes(int m = 16) { return {m, 0.5, 4.5}; }

inline Grid small_grid(int w = 12, int h = 10, int m = 16) {
  return Grid(small_camera(w, h), small_planes(m));
}

// Random labeling with valid invariants: each occupied cell draws a category;
// thing cells draw one of `max_instances` instance ids bound to that category.
inline PanopticVolume random_volume(Rng& rng, const Grid& grid, int categories,
                                    double fill, int max_instances) {
  const CategoryTable table = CategoryTable::standard(categories);
  PanopticVolume v(grid, table);
  for (std::size_t i = 0; i < v.semantic.size(); ++i) {
    if (!rng.bernoulli(fill)) continue;
    const int k = rng.uniform_int(1, categories - 1);
    if (table.is_thing(k)) {
      // Ids are globally unique per category: id = k * 100 + j.
      const auto id = static_cast<std::uint32_t>(k * 100 + rng.uniform_int(1, max_instances));
      v.instance[i] = id;
    }
    v.semantic[i] = static_cast<std::uint16_t>(k);
  }
  return v;
}

// Scene small enough for exhaustive oracles.
inline SynthConfig small_scene_config(std::uint64_t seed, int planes = 32) {
  SynthConfig cfg;
  cfg.seed = seed;
  cfg.width = 32;
  cfg.height = 32;
  cfg.planes = planes;
  cfg.things = 3;
  cfg.min_separation = 4.0;
  return cfg;
}

}  // namespace buol::testing

#endif  // BUOL_TESTS_HELPERS_HPP_
