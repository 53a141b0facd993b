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

// Training objectives evaluated as pure functions (no gradients).
//
// Probabilities entering a logarithm are clamped to [eps, 1 - eps] with
// eps = 1e-7. Every mean is accumulated in fixed 1024-element blocks that are
// then summed pairwise, so values do not depend on the thread count.

#ifndef BUOL_LOSSES_HPP_
#define BUOL_LOSSES_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "buol/maps.hpp"
#include "buol/volume.hpp"

namespace buol {

inline constexpr double kLogEpsilon = 1e-7;
inline constexpr double kDefaultTruncation = 3.0;

struct LossWeights {
  double panoptic2d = 1.0;     // w_p^2d
  double depth2d = 1.0;        // w_d^2d
  double mp_occupancy = 1.0;   // w_o^mp
  double semantic2d = 1.0;     // w_s^2d
  double center2d = 1.0;       // w_c^2d
  double occupancy3d = 1.0;    // w_o^3d
  double semantic3d = 1.0;     // w_s^3d
  double offset3d = 1.0;       // w_dc^3d

  // Throws DomainError on a negative weight.
  void validate() const;
};

struct LossTerm {
  std::string name;
  double value = 0.0;
  double weight = 1.0;
};

// Named terms; total = sum of weight * value.
struct LossReport {
  std::vector<LossTerm> terms;
  double total = 0.0;

  // Throws std::out_of_range for an unknown name.
  double value(const std::string& name) const;
  void add(std::string name, double value, double weight);
  // "key = value" lines: one per term plus "total".
  std::string format() const;
};

// Terms semantic_ce (cross entropy over pixels whose target is not void) and
// center_mse (over all pixels).
LossReport loss_panoptic2d(const SemanticMap2D& pred,
                           const SemanticMap2D& target,
                           const CenterHeatmap& pred_heatmap,
                           const CenterHeatmap& target_heatmap,
                           double w_semantic, double w_center);

enum class DepthLossKind {
  // mean |ln d - ln d_gt| + mean |grad d - grad d_gt| (forward differences
  // over pixel pairs that are both valid).
  kLogL1PlusGradientL1,
};

// Zero when the mask selects no pixel.
double loss_depth(const DepthMap& pred, const DepthMap& target,
                  const Raster<std::uint8_t>& valid,
                  DepthLossKind kind = DepthLossKind::kLogL1PlusGradientL1);

// Mean binary cross entropy.
double loss_mp_occupancy(const MultiPlaneOccupancy& pred,
                         const MultiPlaneOccupancy& target);

// Full 2D objective. Terms: semantic_ce (weight w_p * w_s), center_mse
// (w_p * w_c), depth (w_d) and mp_occupancy (w_o^mp). Depth is evaluated
// where the target depth is positive.
LossReport loss_2d(const Priors2D& pred, const Priors2D& target,
                   const LossWeights& weights = {});

// Truncated signed distance in cells to the occupancy boundary: for a free
// cell the Euclidean distance to the nearest occupied cell, for an occupied
// cell minus the distance to the nearest free cell, clamped to [-t, t].
std::vector<float> tsdf_from_scene(const SceneGT& scene,
                                   double truncation = kDefaultTruncation);

// Ground truth of the 3D objective.
struct Targets3D {
  Grid grid;
  std::vector<std::uint8_t> occupancy;
  std::vector<std::uint16_t> semantic;
  std::vector<std::uint8_t> thing;  // occupied thing cells
  OffsetField3D offsets;
  std::vector<float> tsdf;
  double truncation = kDefaultTruncation;
};

Targets3D derive_targets3d(const SceneGT& scene, const InstanceCenters& centers,
                           double truncation = kDefaultTruncation);

// Terms occupancy_bce and tsdf_l1 (both weight w_o^3d; the L1 is taken over
// cells with |tsdf_gt| < truncation), semantic_ce (w_s^3d, occupied cells) and
// offset_l1 (w_dc^3d, |du| + |dv| per occupied thing cell).
LossReport loss_3d(const Refined3D& refined, std::span<const float> tsdf_pred,
                   const Targets3D& targets, const LossWeights& weights = {});

}  // namespace buol

#endif  // BUOL_LOSSES_HPP_
