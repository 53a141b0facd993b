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

#include "buol/resample.hpp"

#include <numeric>

#include "buol/errors.hpp"
#include "buol/parallel.hpp"

namespace buol {

std::vector<std::int64_t> sample_map(const Grid& from, const Grid& to) {
  if (!from.same_camera(to)) {
    throw ShapeError("resample: source and target use different cameras");
  }
  std::vector<std::int64_t> map(static_cast<std::size_t>(to.cell_count()));
  if (from == to) {
    std::iota(map.begin(), map.end(), std::int64_t{0});
    return map;
  }
  const Extent& target = to.extent();
  const Extent& source = from.extent();
  parallel_for(to.cell_count(), [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t i = begin; i < end; ++i) {
      const Point3 p = to.cell_center(target.cell(i));
      const auto c = from.locate(p);
      map[i] = c ? source.index(c->x, c->y, c->z) : -1;
    }
  });
  return map;
}

PanopticVolume resample_volume(const PanopticVolume& volume, const Grid& to) {
  const auto map = sample_map(volume.grid, to);
  PanopticVolume out(to, volume.categories);
  out.semantic = gather_cells<std::uint16_t>(volume.semantic, 1, map);
  out.instance = gather_cells<std::uint32_t>(volume.instance, 1, map);
  return out;
}

}  // namespace buol
