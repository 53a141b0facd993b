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

#include "buol/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "buol/errors.hpp"
#include "buol/rng.hpp"

namespace buol {

void NoiseSpec::validate() const {
  if (!(depth_sigma >= 0.0) || !std::isfinite(depth_sigma)) {
    throw DomainError("noise: depth sigma must be finite and >= 0");
  }
  if (!(semantic_flip >= 0.0 && semantic_flip <= 1.0)) {
    throw DomainError("noise: semantic flip probability must be in [0, 1]");
  }
  if (!(occupancy_flip >= 0.0 && occupancy_flip <= 1.0)) {
    throw DomainError("noise: occupancy flip probability must be in [0, 1]");
  }
  if (center_jitter < 0) throw DomainError("noise: center jitter must be >= 0");
}

void SynthConfig::validate() const {
  camera().validate();
  depth_planes().validate();
  if (things < 0) throw DomainError("synth: thing count must be >= 0");
  if (stuff < 0 || stuff > 2) {
    throw DomainError("synth: stuff count must be 0, 1 or 2");
  }
  if (categories < 3) throw DomainError("synth: need at least 3 categories");
  if (things > 0 && categories < 4) {
    throw DomainError("synth: things need a thing category (categories >= 4)");
  }
  if (!(min_separation >= 0.0)) {
    throw DomainError("synth: min separation must be >= 0");
  }
  if (max_attempts < 1) throw DomainError("synth: max attempts must be >= 1");
  noise.validate();
}

CameraIntrinsics SynthConfig::camera() const {
  CameraIntrinsics k;
  k.fx = width;
  k.fy = width;
  k.cx = (width - 1) / 2.0;
  k.cy = (height - 1) / 2.0;
  k.width = width;
  k.height = height;
  return k;
}

namespace {

struct Layout {
  int wall_front = 0;   // first wall plane
  int floor_row = 0;    // first floor row
  int floor_front = 0;  // first floor plane
  int thing_front = 0;  // first plane a thing may occupy
};

Layout make_layout(const SynthConfig& cfg) {
  const int m = cfg.planes;
  Layout l;
  l.wall_front = m - std::max(2, m / 8);
  l.floor_row = cfg.stuff >= 2 ? cfg.height - std::max(1, cfg.height / 5)
                               : cfg.height;
  l.floor_front = m / 4;
  l.thing_front = m / 8;
  return l;
}

struct Candidate {
  int category = 0;
  std::vector<CellIndex> cells;  // (u, v, plane)
  int cu = 0;
  int cv = 0;
};

// 6-connectivity over a cell list (coordinates inside the frustum).
bool connected(const std::vector<CellIndex>& cells) {
  if (cells.size() <= 1) return true;
  int x0 = cells[0].x, x1 = x0, y0 = cells[0].y, y1 = y0, z0 = cells[0].z,
      z1 = z0;
  for (const CellIndex& c : cells) {
    x0 = std::min(x0, c.x), x1 = std::max(x1, c.x);
    y0 = std::min(y0, c.y), y1 = std::max(y1, c.y);
    z0 = std::min(z0, c.z), z1 = std::max(z1, c.z);
  }
  const Extent box{x1 - x0 + 1, y1 - y0 + 1, z1 - z0 + 1};
  // 0 outside, 1 member, 2 visited
  std::vector<std::uint8_t> state(static_cast<std::size_t>(box.cells()), 0);
  for (const CellIndex& c : cells) state[box.index(c.x - x0, c.y - y0, c.z - z0)] = 1;
  std::vector<std::int64_t> stack{
      box.index(cells[0].x - x0, cells[0].y - y0, cells[0].z - z0)};
  state[stack.back()] = 2;
  std::size_t seen = 1;
  constexpr std::array<std::array<int, 3>, 6> kSteps{
      {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}}};
  while (!stack.empty()) {
    const CellIndex c = box.cell(stack.back());
    stack.pop_back();
    for (const auto& s : kSteps) {
      const int x = c.x + s[0], y = c.y + s[1], z = c.z + s[2];
      if (!box.contains(x, y, z)) continue;
      const std::int64_t j = box.index(x, y, z);
      if (state[j] != 1) continue;
      state[j] = 2;
      ++seen;
      stack.push_back(j);
    }
  }
  return seen == cells.size();
}

Candidate draw_candidate(Rng& rng, const SynthConfig& cfg, const Layout& l,
                         const std::vector<int>& thing_ids) {
  Candidate c;
  c.category = thing_ids[rng.uniform_int(0, static_cast<int>(thing_ids.size()) - 1)];
  const bool ellipsoid = rng.bernoulli(0.5);
  const int ru = rng.uniform_int(2, std::max(2, cfg.width / 10));
  const int rv = rng.uniform_int(2, std::max(2, cfg.height / 10));
  const int dm = rng.uniform_int(std::max(2, cfg.planes / 16),
                                 std::max(3, cfg.planes / 5));
  const int uc = rng.uniform_int(ru, cfg.width - 1 - ru);
  const int vc = rng.uniform_int(rv, cfg.height - 1 - rv);
  const int m0 = rng.uniform_int(l.thing_front, l.wall_front - dm);

  const double mc = m0 + (dm - 1) / 2.0;
  const double au = ru + 0.5, av = rv + 0.5, am = dm / 2.0;
  std::int64_t su = 0, sv = 0;
  for (int v = vc - rv; v <= vc + rv; ++v) {
    for (int u = uc - ru; u <= uc + ru; ++u) {
      for (int m = m0; m < m0 + dm; ++m) {
        if (ellipsoid) {
          const double a = (u - uc) / au, b = (v - vc) / av, d = (m - mc) / am;
          if (a * a + b * b + d * d > 1.0) continue;
        }
        c.cells.push_back({u, v, m});
        su += u;
        sv += v;
      }
    }
  }
  if (!c.cells.empty()) {
    const auto n = static_cast<std::int64_t>(c.cells.size());
    c.cu = static_cast<int>((2 * su + n) / (2 * n));
    c.cv = static_cast<int>((2 * sv + n) / (2 * n));
  }
  return c;
}

}  // namespace

SceneGT generate_scene(const SynthConfig& cfg) {
  cfg.validate();
  const CategoryTable table = CategoryTable::standard(cfg.categories);
  SceneGT scene(Grid(cfg.camera(), cfg.depth_planes()), table);
  const Extent& e = scene.grid.extent();
  const Layout l = make_layout(cfg);

  if (cfg.things > 0) {
    const int dm_max = std::max(3, cfg.planes / 5);
    if (l.wall_front - dm_max < l.thing_front ||
        cfg.width < 5 || cfg.height < 5) {
      throw PlacementError(
          "synth: image or depth range too small for things (need width, "
          "height >= 5 and room for " +
          std::to_string(dm_max) + " planes in front of the wall)");
    }
  }

  // Per pixel: 1 when some thing covers the column.
  std::vector<std::uint8_t> column_used(
      static_cast<std::size_t>(cfg.width) * cfg.height, 0);
  std::vector<std::array<int, 2>> centers;
  const std::vector<int> thing_ids = table.thing_ids();
  const double sep2 = cfg.min_separation * cfg.min_separation;

  for (int t = 0; t < cfg.things; ++t) {
    Rng rng(cfg.seed, static_cast<std::uint64_t>(Stream::kThing) + t);
    bool placed = false;
    int overlap = 0, separation = 0, disconnected = 0;
    for (int attempt = 0; attempt < cfg.max_attempts && !placed; ++attempt) {
      Candidate c = draw_candidate(rng, cfg, l, thing_ids);
      if (c.cells.empty()) continue;
      bool ok = true;
      for (const CellIndex& q : c.cells) {
        if (scene.semantic[e.index(q.x, q.y, q.z)] != 0 ||
            (!cfg.allow_occlusion &&
             column_used[static_cast<std::size_t>(q.y) * cfg.width + q.x])) {
          ok = false;
          break;
        }
      }
      if (!ok) {
        ++overlap;
        continue;
      }
      for (const auto& p : centers) {
        const double du = p[0] - c.cu, dv = p[1] - c.cv;
        if (du * du + dv * dv < sep2 || (p[0] == c.cu && p[1] == c.cv)) {
          ok = false;
          break;
        }
      }
      if (!ok) {
        ++separation;
        continue;
      }
      if (!connected(c.cells)) {
        ++disconnected;
        continue;
      }
      const auto id = static_cast<std::uint32_t>(t + 1);
      for (const CellIndex& q : c.cells) {
        const std::int64_t i = e.index(q.x, q.y, q.z);
        scene.semantic[i] = static_cast<std::uint16_t>(c.category);
        scene.instance[i] = id;
        column_used[static_cast<std::size_t>(q.y) * cfg.width + q.x] = 1;
      }
      centers.push_back({c.cu, c.cv});
      placed = true;
    }
    if (!placed) {
      std::string msg = "synth: could not place thing " + std::to_string(t) +
                        " in " + std::to_string(cfg.max_attempts) +
                        " attempts; rejections: " + std::to_string(overlap) +
                        (cfg.allow_occlusion ? " 3D overlap"
                                             : " overlapping footprint") +
                        ", " + std::to_string(separation) +
                        " center closer than min separation " +
                        std::to_string(cfg.min_separation) + " px, " +
                        std::to_string(disconnected) + " disconnected";
      throw PlacementError(msg);
    }
  }

  const auto fill_stuff = [&](int category, int v0, int v1, int m0) {
    for (int v = v0; v < v1; ++v) {
      for (int u = 0; u < cfg.width; ++u) {
        if (!cfg.allow_occlusion &&
            column_used[static_cast<std::size_t>(v) * cfg.width + u]) {
          continue;
        }
        for (int m = m0; m < cfg.planes; ++m) {
          const std::int64_t i = e.index(u, v, m);
          if (scene.semantic[i] == 0) {
            scene.semantic[i] = static_cast<std::uint16_t>(category);
          }
        }
      }
    }
  };
  if (cfg.stuff >= 1) fill_stuff(1, 0, l.floor_row, l.wall_front);
  if (cfg.stuff >= 2) fill_stuff(2, l.floor_row, cfg.height, l.floor_front);

  validate_scene(scene);
  return scene;
}

Priors2D perturb_priors(const Priors2D& priors, const NoiseSpec& noise,
                        std::uint64_t seed, const DepthPlanes& planes) {
  noise.validate();
  planes.validate();
  Priors2D out = priors;
  if (noise.is_zero()) return out;

  if (noise.depth_sigma > 0.0) {
    Rng rng(seed, Stream::kDepthNoise);
    const double hi = std::nextafter(planes.z_far, planes.z_near);
    for (double& d : out.depth.data) {
      if (!(d > 0.0)) continue;
      d = std::clamp(d + noise.depth_sigma * rng.normal(), planes.z_near, hi);
    }
  }

  const int c = out.semantics.channels;
  if (noise.semantic_flip > 0.0 && c > 1) {
    Rng rng(seed, Stream::kSemanticNoise);
    for (int v = 0; v < out.semantics.height; ++v) {
      for (int u = 0; u < out.semantics.width; ++u) {
        auto px = out.semantics.pixel(u, v);
        if (!rng.bernoulli(noise.semantic_flip)) continue;
        const int label = rng.uniform_int(1, c - 1);
        if (argmax_lowest(std::span<const double>(px)) == 0) continue;
        std::fill(px.begin(), px.end(), 0.0);
        px[label] = 1.0;
      }
    }
  }

  if (noise.occupancy_flip > 0.0) {
    Rng rng(seed, Stream::kOccupancyNoise);
    for (double& o : out.occupancy.data) {
      if (rng.bernoulli(noise.occupancy_flip)) o = 1.0 - o;
    }
  }

  if (noise.center_jitter > 0) {
    Rng rng(seed, Stream::kCenterJitter);
    const int j = noise.center_jitter;
    const int w = std::max(1, out.depth.width), h = std::max(1, out.depth.height);
    for (InstanceCenter& ic : out.centers) {
      ic.u = std::clamp(ic.u + rng.uniform_int(-j, j), 0, w - 1);
      ic.v = std::clamp(ic.v + rng.uniform_int(-j, j), 0, h - 1);
    }
  }
  return out;
}

}  // namespace buol
