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

// Pixel-aligned 2D priors: semantics, depth, instance centers, center heatmap
// and multi-plane occupancy.

#ifndef BUOL_MAPS_HPP_
#define BUOL_MAPS_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

namespace buol {

// H x W image with `channels` interleaved values per pixel.
template <typename T>
struct Raster {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<T> data;

  Raster() = default;
  Raster(int w, int h, int c = 1, T fill = T{})
      : width(w),
        height(h),
        channels(c),
        data(static_cast<std::size_t>(w) * h * c, fill) {}

  std::size_t offset(int u, int v, int c = 0) const {
    return (static_cast<std::size_t>(v) * width + u) * channels + c;
  }
  T& at(int u, int v, int c = 0) { return data[offset(u, v, c)]; }
  const T& at(int u, int v, int c = 0) const { return data[offset(u, v, c)]; }
  std::span<T> pixel(int u, int v) {
    return {data.data() + offset(u, v), static_cast<std::size_t>(channels)};
  }
  std::span<const T> pixel(int u, int v) const {
    return {data.data() + offset(u, v), static_cast<std::size_t>(channels)};
  }
  bool contains(int u, int v) const {
    return u >= 0 && u < width && v >= 0 && v < height;
  }
  bool same_shape(const Raster& o) const {
    return width == o.width && height == o.height && channels == o.channels;
  }

  friend bool operator==(const Raster&, const Raster&) = default;
};

// Per-pixel category scores, C channels; category 0 is void.
struct SemanticMap2D : Raster<double> {
  using Raster::Raster;
  int categories() const { return channels; }
};

// Metric depth per pixel; 0 means no surface along the ray.
struct DepthMap : Raster<double> {
  using Raster::Raster;
};

// Gaussian-encoded instance center map, values in [0, 1].
struct CenterHeatmap : Raster<double> {
  using Raster::Raster;
};

// Occupancy of each of the M depth planes along each pixel ray. Channel m is
// plane m, so the memory layout equals a frustum grid's.
struct MultiPlaneOccupancy : Raster<double> {
  using Raster::Raster;
  int planes() const { return channels; }
};

struct InstanceCenter {
  int u = 0;
  int v = 0;
  int category = 0;
  std::uint32_t instance_id = 0;

  friend bool operator==(const InstanceCenter&,
                         const InstanceCenter&) = default;
};

using InstanceCenters = std::vector<InstanceCenter>;

// Rendered 2D instance masks: per pixel the visible instance id (0 = none) and
// the category of every id present.
struct InstanceMask2D {
  Raster<std::uint32_t> ids;
  std::map<std::uint32_t, int> category_of;

  friend bool operator==(const InstanceMask2D&,
                         const InstanceMask2D&) = default;
};

// Everything the 2D stage hands to lifting.
struct Priors2D {
  SemanticMap2D semantics;
  DepthMap depth;
  InstanceCenters centers;
  CenterHeatmap heatmap;
  MultiPlaneOccupancy occupancy;

  friend bool operator==(const Priors2D&, const Priors2D&) = default;
};

// Lowest channel index among the maxima of `scores`.
template <typename T>
int argmax_lowest(std::span<const T> scores) {
  int best = 0;
  for (int k = 1; k < static_cast<int>(scores.size()); ++k) {
    if (scores[k] > scores[best]) best = k;
  }
  return best;
}

}  // namespace buol

#endif  // BUOL_MAPS_HPP_
