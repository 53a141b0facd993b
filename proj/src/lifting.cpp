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

#include "buol/lifting.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "buol/errors.hpp"
#include "buol/parallel.hpp"
#include "buol/rng.hpp"

namespace buol {

namespace {

template <typename T>
void require_image_shape(const Raster<T>& map, const Grid& grid,
                         const char* what) {
  if (map.width != grid.camera().width || map.height != grid.camera().height) {
    throw ShapeError(std::string("lift: ") + what +
                     " size does not match the camera image");
  }
}

// Calls fn(cell, u, v, plane) for every cell that is not free space. `plane`
// is the depth plane holding the cell (-1 when an axis-aligned cell lies
// outside [z_near, z_far)). Cells are visited concurrently; fn may only
// write outputs of its own cell.
template <typename Fn>
void for_each_lit_cell(const DepthMap& depth, const Grid& grid, Fn&& fn) {
  require_image_shape(depth, grid, "depth map");
  const Extent& e = grid.extent();
  const DepthPlanes& planes = grid.planes();
  if (grid.is_frustum()) {
    const std::int64_t columns = static_cast<std::int64_t>(e.nx) * e.ny;
    parallel_for(columns, [&](std::int64_t begin, std::int64_t end) {
      for (std::int64_t col = begin; col < end; ++col) {
        const int u = static_cast<int>(col % e.nx);
        const int v = static_cast<int>(col / e.nx);
        const double d = depth.at(u, v);
        if (!(d > 0.0)) continue;
        const std::int64_t base = col * e.nz;
        for (int m = first_plane_at_or_behind(d, planes); m < e.nz; ++m) {
          fn(base + m, u, v, m);
        }
      }
    });
    return;
  }
  parallel_for(e.cells(), [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t i = begin; i < end; ++i) {
      const Point3 p = grid.cell_center(e.cell(i));
      if (!(p.z > 0.0)) continue;
      const PixelDepth q = project(p, grid.camera());
      const int u = round_half_up(q.u);
      const int v = round_half_up(q.v);
      if (!depth.contains(u, v)) continue;
      const double d = depth.at(u, v);
      if (!(d > 0.0) || q.z < d) continue;
      fn(i, u, v, plane_index(q.z, planes).value_or(-1));
    }
  });
}

void require_planes(const MultiPlaneOccupancy& occupancy, const Grid& grid) {
  require_image_shape(occupancy, grid, "multi-plane occupancy");
  if (occupancy.planes() != grid.planes().count) {
    throw ShapeError("lift: multi-plane occupancy has " +
                     std::to_string(occupancy.planes()) + " planes, grid has " +
                     std::to_string(grid.planes().count));
  }
}

}  // namespace

FeatureVolume lift_semantics(const SemanticMap2D& semantics,
                             const DepthMap& depth, const Grid& grid) {
  require_image_shape(semantics, grid, "semantic map");
  FeatureVolume out(grid, semantics.categories());
  const int channels = out.channels;
  for_each_lit_cell(depth, grid, [&](std::int64_t i, int u, int v, int) {
    const auto s = semantics.pixel(u, v);
    float* f = out.features.data() + i * channels;
    for (int c = 0; c < channels; ++c) f[c] = static_cast<float>(s[c]);
    out.occupancy[i] = 1.0f;
  });
  return out;
}

std::vector<float> lift_occupancy(const MultiPlaneOccupancy& occupancy,
                                  const DepthMap& depth, const Grid& grid) {
  require_planes(occupancy, grid);
  std::vector<float> out(static_cast<std::size_t>(grid.cell_count()), 0.0f);
  for_each_lit_cell(depth, grid, [&](std::int64_t i, int u, int v, int m) {
    if (m >= 0) out[i] = static_cast<float>(occupancy.at(u, v, m));
  });
  return out;
}

FeatureVolume occupancy_aware_lift(const SemanticMap2D& semantics,
                                   const MultiPlaneOccupancy& occupancy,
                                   const DepthMap& depth, const Grid& grid,
                                   const LiftTransforms& transforms) {
  require_image_shape(semantics, grid, "semantic map");
  require_planes(occupancy, grid);
  if (!transforms.semantic && !transforms.occupancy) {
    // Identity transforms: fuse both lifts and the product in one pass.
    FeatureVolume out(grid, semantics.categories());
    const int channels = out.channels;
    for_each_lit_cell(depth, grid, [&](std::int64_t i, int u, int v, int m) {
      if (m < 0) return;
      const double o = occupancy.at(u, v, m);
      out.occupancy[i] = static_cast<float>(o);
      if (o == 0.0) return;
      const auto s = semantics.pixel(u, v);
      float* f = out.features.data() + i * channels;
      for (int c = 0; c < channels; ++c) f[c] = static_cast<float>(s[c] * o);
    });
    return out;
  }

  FeatureVolume out = lift_semantics(semantics, depth, grid);
  std::vector<float> lifted_occupancy = lift_occupancy(occupancy, depth, grid);
  if (transforms.semantic) transforms.semantic(out);
  if (transforms.occupancy) transforms.occupancy(lifted_occupancy, grid);
  if (out.grid != grid ||
      lifted_occupancy.size() != static_cast<std::size_t>(grid.cell_count()) ||
      out.features.size() !=
          static_cast<std::size_t>(grid.cell_count()) * out.channels) {
    throw ShapeError("lift: feature transform changed the volume shape");
  }
  const int channels = out.channels;
  parallel_for(grid.cell_count(), [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t i = begin; i < end; ++i) {
      const float o = lifted_occupancy[i];
      float* f = out.features.data() + i * channels;
      for (int c = 0; c < channels; ++c) f[c] *= o;
    }
  });
  out.occupancy = std::move(lifted_occupancy);
  return out;
}

TopDownLift lift_instances_topdown(const InstanceMask2D& masks,
                                   const DepthMap& depth, const Grid& grid,
                                   const ChannelAssignment& assignment,
                                   int n_channels) {
  if (n_channels < 1) throw DomainError("top-down lift: n_channels must be >= 1");
  require_image_shape(masks.ids, grid, "instance mask");

  std::map<std::uint32_t, std::int64_t> area;
  for (const std::uint32_t id : masks.ids.data) {
    if (id != 0) ++area[id];
  }
  struct Entry {
    std::uint32_t id;
    std::int64_t area;
    int category;
  };
  std::vector<Entry> kept;
  for (const auto& [id, a] : area) {
    const auto it = masks.category_of.find(id);
    kept.push_back({id, a, it == masks.category_of.end() ? 0 : it->second});
  }

  TopDownLift result;
  if (static_cast<int>(kept.size()) > n_channels) {
    std::stable_sort(kept.begin(), kept.end(), [](const Entry& a, const Entry& b) {
      return a.area > b.area;
    });
    std::string dropped;
    for (std::size_t j = n_channels; j < kept.size(); ++j) {
      dropped += (dropped.empty() ? "" : ",") + std::to_string(kept[j].id);
    }
    result.warnings.push_back("top-down lift: " + std::to_string(kept.size()) +
                              " instances exceed " + std::to_string(n_channels) +
                              " channels; dropped ids " + dropped);
    kept.resize(n_channels);
    std::sort(kept.begin(), kept.end(),
              [](const Entry& a, const Entry& b) { return a.id < b.id; });
  }

  if (assignment.kind == ChannelAssignment::Kind::kRandom) {
    Rng rng(assignment.seed, Stream::kChannelShuffle);
    rng.shuffle(std::span<Entry>(kept));
  } else {
    std::sort(kept.begin(), kept.end(), [](const Entry& a, const Entry& b) {
      return a.category != b.category ? a.category < b.category : a.id < b.id;
    });
  }

  std::map<std::uint32_t, int> channel_of;
  result.channel_instance.assign(n_channels, 0);
  for (std::size_t c = 0; c < kept.size(); ++c) {
    channel_of[kept[c].id] = static_cast<int>(c);
    result.channel_instance[c] = kept[c].id;
  }

  const DepthPlanes& planes = grid.planes();
  result.volume = FeatureVolume(grid, n_channels);
  FeatureVolume& out = result.volume;
  for_each_lit_cell(depth, grid, [&](std::int64_t i, int u, int v, int m) {
    const std::uint32_t id = masks.ids.at(u, v);
    if (id == 0) return;
    const auto it = channel_of.find(id);
    if (it == channel_of.end()) return;
    if (m != first_plane_at_or_behind(depth.at(u, v), planes)) return;
    out.features[i * n_channels + it->second] = 1.0f;
    out.occupancy[i] = 1.0f;
  });
  return result;
}

}  // namespace buol
