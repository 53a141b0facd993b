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

// Supervision targets derived from a ground-truth scene: the 2D priors
// (semantics, depth, instance centers and their heatmap, multi-plane
// occupancy) and the 3D offsets toward each instance's 2D center.
//
// All derivations except derive_offsets3d need a frustum-aligned scene so that
// every grid column is one camera ray; resample first otherwise.

#ifndef BUOL_PRIORS_HPP_
#define BUOL_PRIORS_HPP_

#include "buol/maps.hpp"
#include "buol/volume.hpp"

namespace buol {

// Depth of the front-most occupied cell along each ray (its plane center),
// 0 where the ray hits nothing.
DepthMap derive_depth(const SceneGT& scene);

// One-hot category of the front-most occupied cell, void where none.
SemanticMap2D derive_semantics2d(const SceneGT& scene);

// Instance id of the front-most occupied cell (0 for stuff or no surface).
InstanceMask2D derive_instances2d(const SceneGT& scene);

// One center per thing instance, ordered by instance id: the mean pixel of
// all of its cells (occluded ones included), rounded half up.
InstanceCenters derive_centers(const SceneGT& scene);

// Max-combined Gaussians exp(-r^2 / (2 sigma^2)) around every center.
CenterHeatmap encode_center_heatmap(const InstanceCenters& centers, int width,
                                    int height, double sigma);

struct PeakOptions {
  double threshold = 0.1;
  int kernel = 3;
  int max_count = 64;
};

// Pixels that beat every other pixel of their kernel x kernel window (equal
// values are won by the smaller (v, u)), with value >= threshold. The
// strongest max_count peaks are returned in decreasing value order, ties in
// (v, u) order, with category = argmax of `semantics` at the peak and
// instance ids 1..N in output order.
InstanceCenters extract_centers(const CenterHeatmap& heatmap,
                                const SemanticMap2D& semantics,
                                const PeakOptions& options = {});

// 1 where the cell is occupied by thing or stuff, else 0.
MultiPlaneOccupancy derive_multiplane_occupancy(const SceneGT& scene);

// (u_c - u, v_c - v) on every occupied thing cell, zero elsewhere. On axis
// grids (u, v) is the pixel containing the projected cell center. Throws
// DomainError when an instance in the scene has no center.
OffsetField3D derive_offsets3d(const SceneGT& scene,
                               const InstanceCenters& centers);

inline constexpr double kDefaultHeatmapSigma = 8.0;

// All 2D priors at once; the heatmap encodes the derived centers.
Priors2D derive_priors(const SceneGT& scene,
                       double heatmap_sigma = kDefaultHeatmapSigma);

}  // namespace buol

#endif  // BUOL_PRIORS_HPP_
