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

#include "buol/reconstruction.hpp"

#include <atomic>
#include <limits>

#include "buol/errors.hpp"
#include "buol/parallel.hpp"
#include "buol/resample.hpp"

namespace buol {

Refined3D identity_refine(const FeatureVolume& lifted,
                          const OffsetField3D& offsets,
                          std::span<const float> occupancy) {
  const auto cells = static_cast<std::size_t>(lifted.grid.cell_count());
  if (offsets.grid != lifted.grid) {
    throw ShapeError("identity_refine: offsets are on a different grid");
  }
  if (occupancy.size() != cells || offsets.offsets.size() != 2 * cells ||
      lifted.features.size() != cells * lifted.channels) {
    throw ShapeError("identity_refine: input sizes do not match the grid");
  }
  Refined3D refined;
  refined.grid = lifted.grid;
  refined.channels = lifted.channels;
  refined.semantics = lifted.features;
  refined.offsets = offsets;
  refined.occupancy.assign(occupancy.begin(), occupancy.end());
  return refined;
}

Refined3D identity_refine(const FeatureVolume& lifted,
                          const OffsetField3D& offsets) {
  return identity_refine(lifted, offsets, lifted.occupancy);
}

MaskedReconstruction mask_by_occupancy(const Refined3D& refined,
                                       double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw DomainError("mask_by_occupancy: threshold must lie in (0, 1)");
  }
  const std::int64_t cells = refined.grid.cell_count();
  const int channels = refined.channels;
  if (refined.semantics.size() != static_cast<std::size_t>(cells * channels) ||
      refined.occupancy.size() != static_cast<std::size_t>(cells) ||
      refined.offsets.offsets.size() != static_cast<std::size_t>(2 * cells)) {
    throw ShapeError("mask_by_occupancy: refined volume sizes are inconsistent");
  }
  MaskedReconstruction out;
  out.grid = refined.grid;
  out.channels = channels;
  out.semantics.assign(refined.semantics.size(), 0.0f);
  out.offsets = OffsetField3D(refined.grid);
  out.occupied.assign(static_cast<std::size_t>(cells), 0);
  parallel_for(cells, [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t i = begin; i < end; ++i) {
      const float o = refined.occupancy[i];
      if (!(o >= threshold)) continue;
      out.occupied[i] = 1;
      for (int c = 0; c < channels; ++c) {
        out.semantics[i * channels + c] = refined.semantics[i * channels + c] * o;
      }
      out.offsets.offsets[2 * i] = refined.offsets.offsets[2 * i] * o;
      out.offsets.offsets[2 * i + 1] = refined.offsets.offsets[2 * i + 1] * o;
    }
  });
  return out;
}

std::vector<float> to_multiplane(std::span<const float> field, int channels,
                                 const Grid& grid) {
  if (field.size() != static_cast<std::size_t>(grid.cell_count()) * channels) {
    throw ShapeError("to_multiplane: field size does not match the grid");
  }
  const Grid frustum(grid.camera(), grid.planes());
  return gather_cells<float>(field, channels, sample_map(grid, frustum));
}

std::vector<float> from_multiplane(std::span<const float> samples,
                                   int channels, const Grid& grid) {
  const Grid frustum(grid.camera(), grid.planes());
  if (samples.size() !=
      static_cast<std::size_t>(frustum.cell_count()) * channels) {
    throw ShapeError("from_multiplane: sample count does not match the frustum");
  }
  return gather_cells<float>(samples, channels, sample_map(frustum, grid));
}

GroupingResult group_instances(const MaskedReconstruction& masked,
                               const InstanceCenters& centers,
                               const CategoryTable& categories) {
  if (masked.channels != categories.size()) {
    throw ShapeError("group_instances: semantic channels do not match the "
                     "category table");
  }
  // Centers bucketed by category, keeping list order.
  struct Candidate {
    double u, v;
    std::uint32_t id;
  };
  std::vector<std::vector<Candidate>> by_category(categories.size());
  for (std::size_t j = 0; j < centers.size(); ++j) {
    const InstanceCenter& c = centers[j];
    if (c.category < 0 || c.category >= categories.size()) continue;
    const std::uint32_t id =
        c.instance_id != 0 ? c.instance_id : static_cast<std::uint32_t>(j + 1);
    by_category[c.category].push_back({double(c.u), double(c.v), id});
  }

  GroupingResult result;
  result.things = PanopticVolume(masked.grid, categories);
  PanopticVolume& things = result.things;
  const Extent& e = masked.grid.extent();
  std::atomic<std::int64_t> dropped{0};
  parallel_for(e.cells(), [&](std::int64_t begin, std::int64_t end) {
    std::int64_t local_dropped = 0;
    for (std::int64_t i = begin; i < end; ++i) {
      if (!masked.occupied[i]) continue;
      const int k = masked.category(i);
      if (!categories.is_thing(k)) continue;
      const auto& candidates = by_category[k];
      const auto pixel = pixel_of_cell(masked.grid, e.cell(i));
      if (candidates.empty() || !pixel) {
        ++local_dropped;
        continue;
      }
      const double su = (*pixel)[0] + double(masked.offsets.du(i));
      const double sv = (*pixel)[1] + double(masked.offsets.dv(i));
      double best = std::numeric_limits<double>::infinity();
      std::uint32_t best_id = 0;
      for (const Candidate& c : candidates) {
        const double du = c.u - su;
        const double dv = c.v - sv;
        const double dist = du * du + dv * dv;
        if (dist < best) {
          best = dist;
          best_id = c.id;
        }
      }
      things.semantic[i] = static_cast<std::uint16_t>(k);
      things.instance[i] = best_id;
    }
    dropped += local_dropped;
  });
  result.dropped_cells = dropped.load();
  return result;
}

PanopticVolume assemble_panoptic(const MaskedReconstruction& masked,
                                 const PanopticVolume& things) {
  if (things.grid != masked.grid) {
    throw ShapeError("assemble_panoptic: things and semantics use different "
                     "grids");
  }
  if (masked.channels != things.categories.size()) {
    throw ShapeError("assemble_panoptic: semantic channels do not match the "
                     "category table");
  }
  PanopticVolume out(masked.grid, things.categories);
  const CategoryTable& categories = things.categories;
  parallel_for(masked.grid.cell_count(),
               [&](std::int64_t begin, std::int64_t end) {
                 for (std::int64_t i = begin; i < end; ++i) {
                   if (!masked.occupied[i]) continue;
                   const int k = masked.category(i);
                   if (categories.is_stuff(k)) {
                     out.semantic[i] = static_cast<std::uint16_t>(k);
                   } else if (categories.is_thing(k) &&
                              things.semantic[i] == k) {
                     out.semantic[i] = things.semantic[i];
                     out.instance[i] = things.instance[i];
                   }
                 }
               });
  return out;
}

}  // namespace buol
