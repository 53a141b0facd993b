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

// Lifting of 2D priors into 3D feature volumes.
//
// Every cell whose depth z lies in front of the pixel's surface (z < d(u, v))
// or whose ray hits nothing (d(u, v) = 0) is free space and stays exactly
// zero. Frustum cells use their plane-center depth; axis-aligned cells sample
// the pixel containing their projected center (nearest neighbor).

#ifndef BUOL_LIFTING_HPP_
#define BUOL_LIFTING_HPP_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "buol/maps.hpp"
#include "buol/volume.hpp"

namespace buol {

// Semantic scores copied to every non-free cell. The returned volume's
// occupancy marks those non-free cells with 1.
FeatureVolume lift_semantics(const SemanticMap2D& semantics,
                             const DepthMap& depth, const Grid& grid);

// Multi-plane occupancy sampled at every non-free cell.
std::vector<float> lift_occupancy(const MultiPlaneOccupancy& occupancy,
                                  const DepthMap& depth, const Grid& grid);

// Per-branch feature transforms applied before the Hadamard product. Empty
// functions are the identity.
struct LiftTransforms {
  std::function<void(FeatureVolume& semantics)> semantic;
  std::function<void(std::vector<float>& occupancy, const Grid& grid)>
      occupancy;
};

// features = T_s(lifted semantics) * T_o(lifted occupancy), broadcast over
// channels; the volume's occupancy holds T_o(lifted occupancy).
FeatureVolume occupancy_aware_lift(const SemanticMap2D& semantics,
                                   const MultiPlaneOccupancy& occupancy,
                                   const DepthMap& depth, const Grid& grid,
                                   const LiftTransforms& transforms = {});

struct ChannelAssignment {
  enum class Kind { kRandom, kCategorySorted };
  Kind kind = Kind::kCategorySorted;
  std::uint64_t seed = 0;

  static ChannelAssignment random(std::uint64_t seed) {
    return {Kind::kRandom, seed};
  }
  static ChannelAssignment category_sorted() { return {}; }
};

struct TopDownLift {
  FeatureVolume volume;
  // Instance id held by each channel, 0 for unused channels.
  std::vector<std::uint32_t> channel_instance;
  std::vector<std::string> warnings;
};

// Top-down baseline: each instance mask is written into one channel, only at
// the plane containing the surface depth. When there are more instances than
// channels the largest masks are kept (ties by smaller id) and a warning is
// recorded. Random assignment shuffles the kept instances (sorted by id) with
// the seeded generator; CategorySorted orders them by (category, id).
TopDownLift lift_instances_topdown(const InstanceMask2D& masks,
                                   const DepthMap& depth, const Grid& grid,
                                   const ChannelAssignment& assignment,
                                   int n_channels);

}  // namespace buol

#endif  // BUOL_LIFTING_HPP_
