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

// Independent reference implementations used by unit and acceptance tests.
// They favor obviousness over speed.

#ifndef BUOL_TESTS_ORACLES_HPP_
#define BUOL_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <set>
#include <vector>

#include "buol/metrics.hpp"
#include "buol/rng.hpp"
#include "buol/volume.hpp"

namespace buol::oracles {

// Up to `max_segments` random boxes painted in order on a 5-category table
// (stuff 1, 2; things 3, 4). Later boxes overwrite earlier ones.
inline PanopticVolume blob_volume(Rng& rng, const Grid& g, int max_segments) {
  PanopticVolume v(g, CategoryTable::standard(5));
  const Extent& e = g.extent();
  const int n = rng.uniform_int(1, max_segments);
  for (int j = 0; j < n; ++j) {
    const int k = rng.uniform_int(1, 4);
    const int x0 = rng.uniform_int(0, e.nx - 1), x1 = rng.uniform_int(x0, e.nx - 1);
    const int y0 = rng.uniform_int(0, e.ny - 1), y1 = rng.uniform_int(y0, e.ny - 1);
    const int z0 = rng.uniform_int(0, e.nz - 1), z1 = rng.uniform_int(z0, e.nz - 1);
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        for (int z = z0; z <= z1; ++z) {
          const std::int64_t i = e.index(x, y, z);
          v.semantic[i] = static_cast<std::uint16_t>(k);
          v.instance[i] = k >= 3 ? static_cast<std::uint32_t>(j + 1) : 0;
        }
      }
    }
  }
  return v;
}

// Each cell takes the label pair of a uniformly chosen cell with probability p.
inline PanopticVolume perturb_volume(Rng& rng, const PanopticVolume& v, double p) {
  PanopticVolume out = v;
  const int n = static_cast<int>(v.semantic.size());
  for (int i = 0; i < n; ++i) {
    if (!rng.bernoulli(p)) continue;
    const int j = rng.uniform_int(0, n - 1);
    out.semantic[i] = v.semantic[j];
    out.instance[i] = v.instance[j];
  }
  return out;
}

inline double set_iou(const std::vector<std::int64_t>& a,
                      const std::vector<std::int64_t>& b) {
  std::set<std::int64_t> u(a.begin(), a.end()), x;
  u.insert(b.begin(), b.end());
  for (std::int64_t c : a) {
    if (std::find(b.begin(), b.end(), c) != b.end()) x.insert(c);
  }
  return static_cast<double>(x.size()) / static_cast<double>(u.size());
}

struct BestMatching {
  int count = 0;
  double iou_sum = 0.0;
};

// Exhaustive search over one-to-one matchings using admissible pairs only;
// best = most pairs, then largest IoU sum.
inline BestMatching brute_force_matching(const std::vector<Segment>& pred,
                                         const std::vector<Segment>& gt,
                                         double threshold) {
  const std::size_t np = pred.size(), ng = gt.size();
  std::vector<double> w(np * ng, -1.0);
  for (std::size_t p = 0; p < np; ++p) {
    for (std::size_t g = 0; g < ng; ++g) {
      const double v = set_iou(pred[p].cells, gt[g].cells);
      if (v > 0 && v >= threshold) w[p * ng + g] = v;
    }
  }
  BestMatching best;
  std::vector<char> used(ng, 0);
  const auto recurse = [&](auto&& self, std::size_t p, int count, double sum) -> void {
    if (p == np) {
      if (count > best.count || (count == best.count && sum > best.iou_sum)) {
        best = {count, sum};
      }
      return;
    }
    self(self, p + 1, count, sum);  // pred p unmatched
    for (std::size_t g = 0; g < ng; ++g) {
      if (used[g] || w[p * ng + g] < 0) continue;
      used[g] = 1;
      self(self, p + 1, count + 1, sum + w[p * ng + g]);
      used[g] = 0;
    }
  };
  recurse(recurse, 0, 0, 0.0);
  return best;
}

// Truncated signed distance by comparing every cell with every other cell:
// distance to the nearest cell of the opposite occupancy, negative inside.
inline std::vector<double> brute_tsdf(const PanopticVolume& v, double t) {
  const Extent& e = v.grid.extent();
  const std::int64_t n = e.cells();
  std::vector<double> out(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    const CellIndex a = e.cell(i);
    const bool inside = v.semantic[i] != 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::int64_t j = 0; j < n; ++j) {
      if ((v.semantic[j] != 0) == inside) continue;
      const CellIndex b = e.cell(j);
      const double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
      best = std::min(best, std::sqrt(dx * dx + dy * dy + dz * dz));
    }
    const double d = std::min(t, best);
    out[i] = inside ? -d : d;
  }
  return out;
}

}  // namespace buol::oracles

#endif  // BUOL_TESTS_ORACLES_HPP_
