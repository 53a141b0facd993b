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

// Bottom-up panoptic reconstruction from refined 3D predictions:
//
//   Refined3D --mask_by_occupancy--> masked semantics / offsets / occupancy
//             --group_instances----> thing instances (nearest 2D center)
//             --assemble_panoptic--> final PanopticVolume
//
// A cell's category is the argmax of its masked semantic scores (lowest id on
// ties); category 0 means void.

#ifndef BUOL_RECONSTRUCTION_HPP_
#define BUOL_RECONSTRUCTION_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "buol/maps.hpp"
#include "buol/volume.hpp"

namespace buol {

// Packs lifted semantics, the given offsets and the occupancy source into a
// Refined3D without touching any value. Stand-in for a learned 3D refinement
// network; injected predictions go through the same entry point.
Refined3D identity_refine(const FeatureVolume& lifted,
                          const OffsetField3D& offsets,
                          std::span<const float> occupancy);

// Uses the lifted volume's own occupancy as the occupancy source.
Refined3D identity_refine(const FeatureVolume& lifted,
                          const OffsetField3D& offsets);

struct MaskedReconstruction {
  Grid grid;
  int channels = 0;
  std::vector<float> semantics;
  OffsetField3D offsets;
  std::vector<std::uint8_t> occupied;

  std::span<const float> cell(std::int64_t i) const {
    return {semantics.data() + i * channels, static_cast<std::size_t>(channels)};
  }
  // Argmax category of cell i (lowest id on ties).
  int category(std::int64_t i) const { return argmax_lowest(cell(i)); }
};

inline constexpr double kDefaultOccupancyThreshold = 0.5;

// occupied = (occupancy >= threshold); semantics and offsets are multiplied
// by the occupancy and zeroed where the cell is not occupied.
MaskedReconstruction mask_by_occupancy(
    const Refined3D& refined,
    double threshold = kDefaultOccupancyThreshold);

// Samples a per-cell field at every (u, v, plane) of the camera's frustum
// grid; the result has the frustum layout with `channels` values per cell.
// Samples outside the field's grid are zero. Identity on frustum grids.
std::vector<float> to_multiplane(std::span<const float> field, int channels,
                                 const Grid& grid);

// Inverse scatter: every cell of `grid` takes the frustum sample containing
// its center.
std::vector<float> from_multiplane(std::span<const float> samples,
                                   int channels, const Grid& grid);

struct GroupingResult {
  PanopticVolume things;
  // Occupied thing cells whose category had no center.
  std::int64_t dropped_cells = 0;
};

// Assigns every occupied thing cell of category k at pixel (u, v) to the
// center of category k nearest (Euclidean, pixels) to (u + du, v + dv); ties
// go to the earlier center in the list. The instance id written is the
// center's instance_id, or its list position + 1 when that id is 0.
GroupingResult group_instances(const MaskedReconstruction& masked,
                               const InstanceCenters& centers,
                               const CategoryTable& categories);

// Stuff cells keep their category with instance 0, thing cells are taken from
// `things`, unoccupied cells are void. Throws ShapeError on grid mismatch.
PanopticVolume assemble_panoptic(const MaskedReconstruction& masked,
                                 const PanopticVolume& things);

}  // namespace buol

#endif  // BUOL_RECONSTRUCTION_HPP_
