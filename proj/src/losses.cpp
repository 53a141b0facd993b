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

#include "buol/losses.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "buol/errors.hpp"
#include "buol/parallel.hpp"
#include "buol/priors.hpp"

namespace buol {

namespace {

constexpr std::int64_t kBlock = 1024;

double pairwise_sum(std::span<const double> values) {
  if (values.empty()) return 0.0;
  if (values.size() == 1) return values[0];
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

// Mean of term(i) over the i in [0, n) for which it is defined. `term`
// returns false to skip an index. Zero when nothing is included.
template <typename Fn>
double stable_mean(std::int64_t n, Fn&& term) {
  const std::int64_t blocks = (n + kBlock - 1) / kBlock;
  std::vector<double> sums(blocks, 0.0);
  std::vector<std::int64_t> counts(blocks, 0);
  parallel_for(blocks, [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t b = begin; b < end; ++b) {
      double sum = 0.0;
      std::int64_t count = 0;
      const std::int64_t last = std::min(n, (b + 1) * kBlock);
      for (std::int64_t i = b * kBlock; i < last; ++i) {
        double value = 0.0;
        if (!term(i, value)) continue;
        sum += value;
        ++count;
      }
      sums[b] = sum;
      counts[b] = count;
    }
  });
  std::int64_t total = 0;
  for (std::int64_t c : counts) total += c;
  return total > 0 ? pairwise_sum(sums) / static_cast<double>(total) : 0.0;
}

double clamp_probability(double p) {
  return std::clamp(p, kLogEpsilon, 1.0 - kLogEpsilon);
}

double bce(double p, double target) {
  const double q = clamp_probability(p);
  return -(target * std::log(q) + (1.0 - target) * std::log(1.0 - q));
}

template <typename A, typename B>
void require_same_shape(const A& a, const B& b, const char* what) {
  if (a.width != b.width || a.height != b.height || a.channels != b.channels) {
    throw ShapeError(std::string(what) + ": prediction and target shapes differ");
  }
}

// Squared Euclidean distance transform of one line (lower envelope of
// parabolas), in place. `out` and `hull` hold n elements, `bounds` n + 1.
void squared_edt_line(double* f, int n, std::int64_t stride,
                      std::vector<double>& out, std::vector<int>& hull,
                      std::vector<double>& bounds) {
  int k = 0;
  hull[0] = 0;
  bounds[0] = -HUGE_VAL;
  bounds[1] = HUGE_VAL;
  for (int q = 1; q < n; ++q) {
    const double fq = f[q * stride];
    double s;
    while (true) {
      const int p = hull[k];
      s = ((fq + double(q) * q) - (f[p * stride] + double(p) * p)) /
          (2.0 * (q - p));
      if (s > bounds[k]) break;
      --k;
    }
    ++k;
    hull[k] = q;
    bounds[k] = s;
    bounds[k + 1] = HUGE_VAL;
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (bounds[k + 1] < q) ++k;
    const int p = hull[k];
    out[q] = double(q - p) * (q - p) + f[p * stride];
  }
  for (int q = 0; q < n; ++q) f[q * stride] = out[q];
}

// Squared distance from every cell to the nearest cell where `source` is
// true; values >= kFar mean no source exists.
constexpr double kFar = 1e12;

std::vector<double> squared_distance_to(const Extent& e,
                                        const std::vector<std::uint8_t>& source) {
  std::vector<double> f(source.size());
  for (std::size_t i = 0; i < source.size(); ++i) f[i] = source[i] ? 0.0 : kFar;
  const int longest = std::max({e.nx, e.ny, e.nz});
  // Along z (contiguous), then x, then y.
  const auto pass = [&](std::int64_t lines, int n, std::int64_t stride,
                        auto&& line_start) {
    parallel_for(lines, [&](std::int64_t begin, std::int64_t end) {
      std::vector<double> out(longest);
      std::vector<int> hull(longest);
      std::vector<double> bounds(longest + 1);
      for (std::int64_t l = begin; l < end; ++l) {
        squared_edt_line(f.data() + line_start(l), n, stride, out, hull, bounds);
      }
    });
  };
  pass(std::int64_t(e.nx) * e.ny, e.nz, 1,
       [&](std::int64_t l) { return l * e.nz; });
  pass(std::int64_t(e.ny) * e.nz, e.nx, e.nz, [&](std::int64_t l) {
    const std::int64_t y = l / e.nz;
    const std::int64_t z = l % e.nz;
    return e.index(0, static_cast<int>(y), static_cast<int>(z));
  });
  pass(std::int64_t(e.nx) * e.nz, e.ny, std::int64_t(e.nx) * e.nz,
       [&](std::int64_t l) {
         const std::int64_t x = l / e.nz;
         const std::int64_t z = l % e.nz;
         return e.index(static_cast<int>(x), 0, static_cast<int>(z));
       });
  return f;
}

}  // namespace

void LossWeights::validate() const {
  for (double w : {panoptic2d, depth2d, mp_occupancy, semantic2d, center2d,
                   occupancy3d, semantic3d, offset3d}) {
    if (!(w >= 0.0)) throw DomainError("loss weights must be nonnegative");
  }
}

double LossReport::value(const std::string& name) const {
  for (const LossTerm& t : terms) {
    if (t.name == name) return t.value;
  }
  throw std::out_of_range("loss report has no term " + name);
}

void LossReport::add(std::string name, double value, double weight) {
  terms.push_back({std::move(name), value, weight});
  total += weight * value;
}

std::string LossReport::format() const {
  std::string out;
  char line[160];
  for (const LossTerm& t : terms) {
    std::snprintf(line, sizeof(line), "%s = %.17g\n%s.weight = %.17g\n",
                  t.name.c_str(), t.value, t.name.c_str(), t.weight);
    out += line;
  }
  std::snprintf(line, sizeof(line), "total = %.17g\n", total);
  out += line;
  return out;
}

LossReport loss_panoptic2d(const SemanticMap2D& pred,
                           const SemanticMap2D& target,
                           const CenterHeatmap& pred_heatmap,
                           const CenterHeatmap& target_heatmap,
                           double w_semantic, double w_center) {
  require_same_shape(pred, target, "loss_panoptic2d semantics");
  require_same_shape(pred_heatmap, target_heatmap, "loss_panoptic2d heatmap");
  const int channels = pred.channels;
  const std::int64_t pixels = std::int64_t(pred.width) * pred.height;
  const double ce = stable_mean(pixels, [&](std::int64_t i, double& value) {
    const double* t = target.data.data() + i * channels;
    const double* p = pred.data.data() + i * channels;
    if (argmax_lowest(std::span<const double>(t, channels)) == 0) return false;
    value = 0.0;
    for (int c = 0; c < channels; ++c) {
      if (t[c] != 0.0) value -= t[c] * std::log(clamp_probability(p[c]));
    }
    return true;
  });
  const double mse = stable_mean(
      static_cast<std::int64_t>(pred_heatmap.data.size()),
      [&](std::int64_t i, double& value) {
        const double d = pred_heatmap.data[i] - target_heatmap.data[i];
        value = d * d;
        return true;
      });
  LossReport report;
  report.add("semantic_ce", ce, w_semantic);
  report.add("center_mse", mse, w_center);
  return report;
}

double loss_depth(const DepthMap& pred, const DepthMap& target,
                  const Raster<std::uint8_t>& valid, DepthLossKind kind) {
  require_same_shape(pred, target, "loss_depth");
  if (valid.width != pred.width || valid.height != pred.height) {
    throw ShapeError("loss_depth: mask shape differs from the depth maps");
  }
  switch (kind) {
    case DepthLossKind::kLogL1PlusGradientL1:
      break;
  }
  const int w = pred.width;
  const std::int64_t pixels = std::int64_t(w) * pred.height;
  const auto log_depth = [](double d) { return std::log(std::max(d, kLogEpsilon)); };
  const double log_term = stable_mean(pixels, [&](std::int64_t i, double& value) {
    if (!valid.data[i]) return false;
    value = std::abs(log_depth(pred.data[i]) - log_depth(target.data[i]));
    return true;
  });
  // Index 2i is the x-difference at pixel i, 2i + 1 the y-difference.
  const double gradient_term =
      stable_mean(2 * pixels, [&](std::int64_t j, double& value) {
        const std::int64_t i = j / 2;
        const int u = static_cast<int>(i % w);
        const int v = static_cast<int>(i / w);
        const bool along_x = (j % 2) == 0;
        const int qu = along_x ? u + 1 : u;
        const int qv = along_x ? v : v + 1;
        if (!valid.contains(qu, qv)) return false;
        if (!valid.at(u, v) || !valid.at(qu, qv)) return false;
        const double gp = pred.at(qu, qv) - pred.at(u, v);
        const double gt = target.at(qu, qv) - target.at(u, v);
        value = std::abs(gp - gt);
        return true;
      });
  return log_term + gradient_term;
}

double loss_mp_occupancy(const MultiPlaneOccupancy& pred,
                         const MultiPlaneOccupancy& target) {
  require_same_shape(pred, target, "loss_mp_occupancy");
  return stable_mean(static_cast<std::int64_t>(pred.data.size()),
                     [&](std::int64_t i, double& value) {
                       value = bce(pred.data[i], target.data[i]);
                       return true;
                     });
}

LossReport loss_2d(const Priors2D& pred, const Priors2D& target,
                   const LossWeights& weights) {
  weights.validate();
  const LossReport panoptic =
      loss_panoptic2d(pred.semantics, target.semantics, pred.heatmap,
                      target.heatmap, weights.semantic2d, weights.center2d);
  Raster<std::uint8_t> valid(target.depth.width, target.depth.height);
  for (std::size_t i = 0; i < valid.data.size(); ++i) {
    valid.data[i] = target.depth.data[i] > 0.0 ? 1 : 0;
  }
  LossReport report;
  for (const LossTerm& t : panoptic.terms) {
    report.add(t.name, t.value, weights.panoptic2d * t.weight);
  }
  report.add("depth", loss_depth(pred.depth, target.depth, valid),
             weights.depth2d);
  report.add("mp_occupancy", loss_mp_occupancy(pred.occupancy, target.occupancy),
             weights.mp_occupancy);
  return report;
}

std::vector<float> tsdf_from_scene(const SceneGT& scene, double truncation) {
  if (!(truncation >= 1.0)) throw DomainError("tsdf: truncation must be >= 1");
  const Extent& e = scene.grid.extent();
  std::vector<std::uint8_t> occupied(scene.semantic.size()), free(scene.semantic.size());
  for (std::size_t i = 0; i < occupied.size(); ++i) {
    occupied[i] = scene.semantic[i] != 0;
    free[i] = !occupied[i];
  }
  const std::vector<double> to_occupied = squared_distance_to(e, occupied);
  const std::vector<double> to_free = squared_distance_to(e, free);
  std::vector<float> tsdf(occupied.size());
  for (std::size_t i = 0; i < tsdf.size(); ++i) {
    const double d2 = occupied[i] ? to_free[i] : to_occupied[i];
    const double d = d2 >= kFar ? truncation : std::min(truncation, std::sqrt(d2));
    tsdf[i] = static_cast<float>(occupied[i] ? -d : d);
  }
  return tsdf;
}

Targets3D derive_targets3d(const SceneGT& scene, const InstanceCenters& centers,
                           double truncation) {
  Targets3D t;
  t.grid = scene.grid;
  t.truncation = truncation;
  const std::size_t n = scene.semantic.size();
  t.occupancy.resize(n);
  t.thing.resize(n);
  t.semantic = scene.semantic;
  for (std::size_t i = 0; i < n; ++i) {
    t.occupancy[i] = scene.semantic[i] != 0;
    t.thing[i] = scene.instance[i] != 0 &&
                 scene.categories.is_thing(scene.semantic[i]);
  }
  t.offsets = derive_offsets3d(scene, centers);
  t.tsdf = tsdf_from_scene(scene, truncation);
  return t;
}

LossReport loss_3d(const Refined3D& refined, std::span<const float> tsdf_pred,
                   const Targets3D& targets, const LossWeights& weights) {
  weights.validate();
  if (refined.grid != targets.grid) {
    throw ShapeError("loss_3d: prediction and targets use different grids");
  }
  const std::int64_t cells = targets.grid.cell_count();
  const int channels = refined.channels;
  if (refined.occupancy.size() != static_cast<std::size_t>(cells) ||
      refined.semantics.size() != static_cast<std::size_t>(cells * channels) ||
      refined.offsets.offsets.size() != static_cast<std::size_t>(2 * cells) ||
      tsdf_pred.size() != static_cast<std::size_t>(cells) ||
      targets.tsdf.size() != static_cast<std::size_t>(cells)) {
    throw ShapeError("loss_3d: prediction sizes do not match the grid");
  }
  const double occupancy_bce =
      stable_mean(cells, [&](std::int64_t i, double& value) {
        value = bce(refined.occupancy[i], targets.occupancy[i]);
        return true;
      });
  const double tsdf_l1 = stable_mean(cells, [&](std::int64_t i, double& value) {
    const double gt = targets.tsdf[i];
    if (!(std::abs(gt) < targets.truncation)) return false;
    value = std::abs(double(tsdf_pred[i]) - gt);
    return true;
  });
  const double semantic_ce =
      stable_mean(cells, [&](std::int64_t i, double& value) {
        if (!targets.occupancy[i]) return false;
        const int k = targets.semantic[i];
        if (k >= channels) {
          throw ShapeError("loss_3d: target category exceeds semantic channels");
        }
        value = -std::log(clamp_probability(refined.semantics[i * channels + k]));
        return true;
      });
  const double offset_l1 = stable_mean(cells, [&](std::int64_t i, double& value) {
    if (!targets.thing[i]) return false;
    value = std::abs(double(refined.offsets.du(i)) - targets.offsets.du(i)) +
            std::abs(double(refined.offsets.dv(i)) - targets.offsets.dv(i));
    return true;
  });
  LossReport report;
  report.add("occupancy_bce", occupancy_bce, weights.occupancy3d);
  report.add("tsdf_l1", tsdf_l1, weights.occupancy3d);
  report.add("semantic_ce", semantic_ce, weights.semantic3d);
  report.add("offset_l1", offset_l1, weights.offset3d);
  return report;
}

}  // namespace buol
