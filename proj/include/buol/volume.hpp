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

#ifndef BUOL_VOLUME_HPP_
#define BUOL_VOLUME_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "buol/geometry.hpp"

namespace buol {

struct Category {
  std::string name;
  bool thing = false;

  friend bool operator==(const Category&, const Category&) = default;
};

// Category ids are contiguous from 0; id 0 is void and never a thing.
class CategoryTable {
 public:
  CategoryTable() : entries_{{"void", false}} {}
  explicit CategoryTable(std::vector<Category> entries);

  // void, wall, floor and `things` thing categories named thing_<id>.
  static CategoryTable standard(int categories);

  int size() const { return static_cast<int>(entries_.size()); }
  bool is_thing(int k) const {
    return k > 0 && k < size() && entries_[k].thing;
  }
  bool is_stuff(int k) const {
    return k > 0 && k < size() && !entries_[k].thing;
  }
  const Category& operator[](int k) const { return entries_[k]; }
  const std::vector<Category>& entries() const { return entries_; }
  std::vector<int> thing_ids() const;
  std::vector<int> stuff_ids() const;

  friend bool operator==(const CategoryTable&, const CategoryTable&) = default;

 private:
  std::vector<Category> entries_;
};

// Final per-cell labeling. Invariants (checked by validate()):
//   instance > 0  => semantic is a thing category
//   stuff or void => instance == 0
//   semantic == 0 => cell unoccupied
struct PanopticVolume {
  Grid grid;
  CategoryTable categories;
  std::vector<std::uint16_t> semantic;
  std::vector<std::uint32_t> instance;

  PanopticVolume() = default;
  PanopticVolume(const Grid& g, const CategoryTable& table)
      : grid(g),
        categories(table),
        semantic(static_cast<std::size_t>(g.cell_count()), 0),
        instance(static_cast<std::size_t>(g.cell_count()), 0) {}

  bool occupied(std::int64_t i) const { return semantic[i] != 0; }
  std::int64_t occupied_count() const;
  // Throws ShapeError on size mismatches and DomainError on label
  // invariant violations, naming the first offending cell.
  void validate() const;

  friend bool operator==(const PanopticVolume&,
                         const PanopticVolume&) = default;
};

// Ground-truth scene: a panoptic volume whose instance ids are globally
// unique (each id belongs to exactly one thing category).
using SceneGT = PanopticVolume;

// validate() plus the instance-id uniqueness required of ground truth.
void validate_scene(const SceneGT& scene);

// Lifted per-cell features with a parallel per-cell occupancy value.
struct FeatureVolume {
  Grid grid;
  int channels = 0;
  std::vector<float> features;   // cell-major, `channels` per cell
  std::vector<float> occupancy;  // one per cell

  FeatureVolume() = default;
  FeatureVolume(const Grid& g, int c)
      : grid(g),
        channels(c),
        features(static_cast<std::size_t>(g.cell_count()) * c, 0.0f),
        occupancy(static_cast<std::size_t>(g.cell_count()), 0.0f) {}

  std::span<float> cell(std::int64_t i) {
    return {features.data() + i * channels, static_cast<std::size_t>(channels)};
  }
  std::span<const float> cell(std::int64_t i) const {
    return {features.data() + i * channels, static_cast<std::size_t>(channels)};
  }

  friend bool operator==(const FeatureVolume&,
                         const FeatureVolume&) = default;
};

// Per-cell (du, dv) pixel offset toward the cell's instance center.
struct OffsetField3D {
  Grid grid;
  std::vector<float> offsets;  // 2 per cell

  OffsetField3D() = default;
  explicit OffsetField3D(const Grid& g)
      : grid(g), offsets(static_cast<std::size_t>(g.cell_count()) * 2, 0.0f) {}

  float du(std::int64_t i) const { return offsets[2 * i]; }
  float dv(std::int64_t i) const { return offsets[2 * i + 1]; }

  friend bool operator==(const OffsetField3D&,
                         const OffsetField3D&) = default;
};

// Output of the 3D refinement stage: semantic scores, offsets and occupancy.
struct Refined3D {
  Grid grid;
  int channels = 0;
  std::vector<float> semantics;
  OffsetField3D offsets;
  std::vector<float> occupancy;

  friend bool operator==(const Refined3D&, const Refined3D&) = default;
};

}  // namespace buol

#endif  // BUOL_VOLUME_HPP_
