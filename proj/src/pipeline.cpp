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

#include "buol/pipeline.hpp"

#include "buol/lifting.hpp"
#include "buol/priors.hpp"

namespace buol {

ReconstructionOutput reconstruct(const Priors2D& priors,
                                 const OffsetField3D& offsets,
                                 const CategoryTable& categories,
                                 const Grid& grid,
                                 double occupancy_threshold) {
  ReconstructionOutput out;
  out.lifted = occupancy_aware_lift(priors.semantics, priors.occupancy,
                                    priors.depth, grid);
  const Refined3D refined = identity_refine(out.lifted, offsets);
  const MaskedReconstruction masked =
      mask_by_occupancy(refined, occupancy_threshold);
  GroupingResult grouped = group_instances(masked, priors.centers, categories);
  out.dropped_cells = grouped.dropped_cells;
  out.panoptic = assemble_panoptic(masked, grouped.things);
  return out;
}

PanopticVolume oracle_reconstruction(const SceneGT& scene) {
  const Priors2D priors = derive_priors(scene);
  const OffsetField3D offsets = derive_offsets3d(scene, priors.centers);
  return reconstruct(priors, offsets, scene.categories, scene.grid).panoptic;
}

}  // namespace buol
