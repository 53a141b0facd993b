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

#include "buol/priors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <unordered_map>

#include "buol/errors.hpp"
#include "buol/parallel.hpp"

namespace buol {

namespace {

void require_frustum(const SceneGT& scene, const char* op) {
  if (!scene.grid.is_frustum()) {
    throw ShapeError(std::string(op) +
                     ": scene must be frustum-aligned (resample first)");
  }
}

// Plane of the front-most occupied cell of every ray, -1 where none.
Raster<int> front_planes(const SceneGT& scene) {
  const Extent& e = scene.grid.extent();
  Raster<int> front(e.nx, e.ny, 1, -1);
  parallel_for(e.ny, [&](std::int64_t begin, std::int64_t end) {
    for (int v = static_cast<int>(begin); v < end; ++v) {
      for (int u = 0; u < e.nx; ++u) {
        const std::int64_t base = e.index(u, v, 0);
        for (int m = 0; m < e.nz; ++m) {
          if (scene.semantic[base + m] != 0) {
            front.at(u, v) = m;
            break;
          }
        }
      }
    }
  });
  return front;
}

}  // namespace

DepthMap derive_depth(const SceneGT& scene) {
  require_frustum(scene, "derive_depth");
  const Raster<int> front = front_planes(scene);
  DepthMap depth(front.width, front.height);
  for (std::size_t p = 0; p < front.data.size(); ++p) {
    if (front.data[p] >= 0) {
      depth.data[p] = scene.grid.planes().center(front.data[p]);
    }
  }
  return depth;
}

SemanticMap2D derive_semantics2d(const SceneGT& scene) {
  require_frustum(scene, "derive_semantics2d");
  const Raster<int> front = front_planes(scene);
  const Extent& e = scene.grid.extent();
  SemanticMap2D semantics(e.nx, e.ny, scene.categories.size());
  for (int v = 0; v < e.ny; ++v) {
    for (int u = 0; u < e.nx; ++u) {
      const int m = front.at(u, v);
      const int k = m < 0 ? 0 : scene.semantic[e.index(u, v, m)];
      semantics.at(u, v, k) = 1.0;
    }
  }
  return semantics;
}

InstanceMask2D derive_instances2d(const SceneGT& scene) {
  require_frustum(scene, "derive_instances2d");
  const Raster<int> front = front_planes(scene);
  const Extent& e = scene.grid.extent();
  InstanceMask2D mask;
  mask.ids = Raster<std::uint32_t>(e.nx, e.ny);
  for (int v = 0; v < e.ny; ++v) {
    for (int u = 0; u < e.nx; ++u) {
      const int m = front.at(u, v);
      if (m < 0) continue;
      const std::int64_t i = e.index(u, v, m);
      const std::uint32_t id = scene.instance[i];
      if (id == 0) continue;
      mask.ids.at(u, v) = id;
      mask.category_of.emplace(id, scene.semantic[i]);
    }
  }
  return mask;
}

InstanceCenters derive_centers(const SceneGT& scene) {
  require_frustum(scene, "derive_centers");
  struct Accumulator {
    std::int64_t su = 0;
    std::int64_t sv = 0;
    std::int64_t count = 0;
    int category = 0;
  };
  std::map<std::uint32_t, Accumulator> acc;
  const Extent& e = scene.grid.extent();
  for (std::int64_t i = 0; i < e.cells(); ++i) {
    const std::uint32_t id = scene.instance[i];
    if (id == 0) continue;
    const CellIndex c = e.cell(i);
    Accumulator& a = acc[id];
    a.su += c.x;
    a.sv += c.y;
    a.count += 1;
    a.category = scene.semantic[i];
  }
  InstanceCenters centers;
  centers.reserve(acc.size());
  for (const auto& [id, a] : acc) {
    // floor(sum / n + 1/2) in exact integer arithmetic (sums are >= 0).
    const auto half_up = [n = a.count](std::int64_t sum) {
      return static_cast<int>((2 * sum + n) / (2 * n));
    };
    centers.push_back({half_up(a.su), half_up(a.sv), a.category, id});
  }
  return centers;
}

CenterHeatmap encode_center_heatmap(const InstanceCenters& centers, int width,
                                    int height, double sigma) {
  if (!(sigma > 0.0)) throw DomainError("heatmap: sigma must be positive");
  CenterHeatmap heatmap(width, height);
  if (centers.empty()) return heatmap;
  const double inv = 1.0 / (2.0 * sigma * sigma);
  for (int v = 0; v < height; ++v) {
    for (int u = 0; u < width; ++u) {
      double best = 0.0;
      for (const InstanceCenter& c : centers) {
        const double du = u - c.u;
        const double dv = v - c.v;
        best = std::max(best, std::exp(-(du * du + dv * dv) * inv));
      }
      heatmap.at(u, v) = best;
    }
  }
  return heatmap;
}

InstanceCenters extract_centers(const CenterHeatmap& heatmap,
                                const SemanticMap2D& semantics,
                                const PeakOptions& options) {
  if (!(options.threshold > 0.0 && options.threshold < 1.0)) {
    throw DomainError("extract_centers: threshold must lie in (0, 1)");
  }
  if (options.kernel < 3 || options.kernel % 2 == 0) {
    throw DomainError("extract_centers: kernel must be odd and >= 3");
  }
  if (heatmap.width != semantics.width || heatmap.height != semantics.height) {
    throw ShapeError("extract_centers: heatmap and semantics differ in size");
  }
  const int r = options.kernel / 2;
  struct Peak {
    double value;
    int u, v;
  };
  std::vector<Peak> peaks;
  for (int v = 0; v < heatmap.height; ++v) {
    for (int u = 0; u < heatmap.width; ++u) {
      const double value = heatmap.at(u, v);
      if (!(value >= options.threshold)) continue;
      bool is_peak = true;
      for (int dv = -r; dv <= r && is_peak; ++dv) {
        for (int du = -r; du <= r; ++du) {
          if (du == 0 && dv == 0) continue;
          const int qu = u + du;
          const int qv = v + dv;
          if (!heatmap.contains(qu, qv)) continue;
          const double q = heatmap.at(qu, qv);
          // Neighbors before (v, u) in scan order win ties.
          const bool earlier = qv < v || (qv == v && qu < u);
          if (q > value || (q == value && earlier)) {
            is_peak = false;
            break;
          }
        }
      }
      if (is_peak) peaks.push_back({value, u, v});
    }
  }
  std::stable_sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) {
    return a.value > b.value;
  });
  if (static_cast<int>(peaks.size()) > options.max_count) {
    peaks.resize(std::max(options.max_count, 0));
  }
  InstanceCenters centers;
  centers.reserve(peaks.size());
  for (const Peak& p : peaks) {
    const int k = argmax_lowest(semantics.pixel(p.u, p.v));
    centers.push_back(
        {p.u, p.v, k, static_cast<std::uint32_t>(centers.size() + 1)});
  }
  return centers;
}

MultiPlaneOccupancy derive_multiplane_occupancy(const SceneGT& scene) {
  require_frustum(scene, "derive_multiplane_occupancy");
  const Extent& e = scene.grid.extent();
  MultiPlaneOccupancy occupancy(e.nx, e.ny, e.nz);
  // Raster layout (v, u, m) equals the frustum grid layout.
  for (std::int64_t i = 0; i < e.cells(); ++i) {
    occupancy.data[i] = scene.semantic[i] != 0 ? 1.0 : 0.0;
  }
  return occupancy;
}

OffsetField3D derive_offsets3d(const SceneGT& scene,
                               const InstanceCenters& centers) {
  std::unordered_map<std::uint32_t, const InstanceCenter*> by_id;
  for (const InstanceCenter& c : centers) by_id.emplace(c.instance_id, &c);
  OffsetField3D field(scene.grid);
  const Extent& e = scene.grid.extent();
  for (std::int64_t i = 0; i < e.cells(); ++i) {
    const std::uint32_t id = scene.instance[i];
    if (id == 0 || !scene.categories.is_thing(scene.semantic[i])) continue;
    const auto it = by_id.find(id);
    if (it == by_id.end()) {
      throw DomainError("derive_offsets3d: no center for instance " +
                        std::to_string(id));
    }
    const auto pixel = pixel_of_cell(scene.grid, e.cell(i));
    if (!pixel) continue;
    field.offsets[2 * i] = static_cast<float>(it->second->u - (*pixel)[0]);
    field.offsets[2 * i + 1] = static_cast<float>(it->second->v - (*pixel)[1]);
  }
  return field;
}

Priors2D derive_priors(const SceneGT& scene, double heatmap_sigma) {
  Priors2D priors;
  priors.semantics = derive_semantics2d(scene);
  priors.depth = derive_depth(scene);
  priors.centers = derive_centers(scene);
  priors.heatmap = encode_center_heatmap(
      priors.centers, priors.depth.width, priors.depth.height, heatmap_sigma);
  priors.occupancy = derive_multiplane_occupancy(scene);
  return priors;
}

}  // namespace buol
