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

// Seeded procedural frustum scenes and prior corruption.
//
// Scenes use the standard category table (void, wall, floor, thing_3, ...).
// Things are axis-aligned boxes or digitized ellipsoids in (u, v, plane)
// coordinates placed between plane M/8 and the wall. The wall fills the last
// M/8 planes above the floor rows; the floor fills the bottom H/5 rows from
// plane M/4 backwards. Without occlusion no two things share a pixel column
// and stuff is left out of thing columns, so every ray meets one segment.
//
// All randomness comes from buol::Rng streams: thing i draws from
// Stream::kThing + i, so its placement does not depend on how many attempts
// earlier things needed.

#ifndef BUOL_SYNTH_HPP_
#define BUOL_SYNTH_HPP_

#include <cstdint>

#include "buol/geometry.hpp"
#include "buol/maps.hpp"
#include "buol/volume.hpp"

namespace buol {

struct NoiseSpec {
  double depth_sigma = 0.0;      // meters
  double semantic_flip = 0.0;    // probability
  double occupancy_flip = 0.0;   // probability
  int center_jitter = 0;         // pixels

  void validate() const;
  bool is_zero() const {
    return depth_sigma == 0.0 && semantic_flip == 0.0 &&
           occupancy_flip == 0.0 && center_jitter == 0;
  }

  friend bool operator==(const NoiseSpec&, const NoiseSpec&) = default;
};

struct SynthConfig {
  std::uint64_t seed = 0;
  int width = 64;
  int height = 64;
  int planes = 64;
  double z_near = 0.4;
  double z_far = 6.0;
  int categories = 11;
  int things = 4;
  int stuff = 2;  // 0: none, 1: wall, 2: wall and floor
  double min_separation = 6.0;
  bool allow_occlusion = false;
  int max_attempts = 1000;
  NoiseSpec noise;

  void validate() const;
  // fx = fy = width, principal point at the image center.
  CameraIntrinsics camera() const;
  DepthPlanes depth_planes() const { return {planes, z_near, z_far}; }

  friend bool operator==(const SynthConfig&, const SynthConfig&) = default;
};

// Throws PlacementError naming the violated constraint when a thing cannot be
// placed within max_attempts.
SceneGT generate_scene(const SynthConfig& config);

// Depth: + N(0, sigma) on pixels with a surface, clamped to [z_near, z_far).
// Semantics: each non-void pixel is relabeled with probability p to a
// uniformly drawn non-void category (one-hot). Occupancy: each value o becomes
// 1 - o with probability p. Centers: each coordinate moves by a uniform
// integer in [-jitter, jitter], clamped to the image. The heatmap is left
// unchanged. Deterministic per seed; zero noise returns the input unchanged.
Priors2D perturb_priors(const Priors2D& priors, const NoiseSpec& noise,
                        std::uint64_t seed, const DepthPlanes& planes);

}  // namespace buol

#endif  // BUOL_SYNTH_HPP_
