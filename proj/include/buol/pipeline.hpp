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

// End-to-end bottom-up reconstruction with the learned 3D stage replaced by
// identity refinement:
//
//   occupancy_aware_lift -> identity_refine -> mask_by_occupancy
//     -> group_instances -> assemble_panoptic

#ifndef BUOL_PIPELINE_HPP_
#define BUOL_PIPELINE_HPP_

#include <cstdint>

#include "buol/maps.hpp"
#include "buol/reconstruction.hpp"
#include "buol/volume.hpp"

namespace buol {

struct ReconstructionOutput {
  FeatureVolume lifted;
  PanopticVolume panoptic;
  std::int64_t dropped_cells = 0;
};

// `offsets` stands in for the 3D offset prediction; `grid` must share the
// priors' camera and image size.
ReconstructionOutput reconstruct(const Priors2D& priors,
                                 const OffsetField3D& offsets,
                                 const CategoryTable& categories,
                                 const Grid& grid,
                                 double occupancy_threshold =
                                     kDefaultOccupancyThreshold);

// Ground-truth priors and offsets of `scene` fed through reconstruct().
PanopticVolume oracle_reconstruction(const SceneGT& scene);

}  // namespace buol

#endif  // BUOL_PIPELINE_HPP_
