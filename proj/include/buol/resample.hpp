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

// Nearest-neighbor transfer of per-cell data between grid frames that share a
// camera: each target cell takes the value of the source cell containing its
// center.

#ifndef BUOL_RESAMPLE_HPP_
#define BUOL_RESAMPLE_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "buol/geometry.hpp"
#include "buol/volume.hpp"

namespace buol {

// For every cell of `to`, the linear index of the `from` cell containing its
// center, or -1 when that point is outside `from`. Throws ShapeError when the
// grids use different cameras or depth planes.
std::vector<std::int64_t> sample_map(const Grid& from, const Grid& to);

// Gathers `channels` values per cell through `map`; unmapped cells get fill.
template <typename T>
std::vector<T> gather_cells(std::span<const T> values, int channels,
                            std::span<const std::int64_t> map, T fill = T{}) {
  std::vector<T> out(map.size() * channels, fill);
  for (std::size_t i = 0; i < map.size(); ++i) {
    if (map[i] < 0) continue;
    for (int c = 0; c < channels; ++c) {
      out[i * channels + c] = values[map[i] * channels + c];
    }
  }
  return out;
}

// Labels become void where the target cell center leaves the source grid.
PanopticVolume resample_volume(const PanopticVolume& volume, const Grid& to);

}  // namespace buol

#endif  // BUOL_RESAMPLE_HPP_
