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

#include "buol/volume.hpp"

#include <algorithm>
#include <string>
#include <unordered_map>

#include "buol/errors.hpp"

namespace buol {

CategoryTable::CategoryTable(std::vector<Category> entries)
    : entries_(std::move(entries)) {
  if (entries_.empty()) throw DomainError("category table is empty");
  if (entries_[0].thing) throw DomainError("category 0 (void) cannot be a thing");
}

CategoryTable CategoryTable::standard(int categories) {
  if (categories < 3) {
    throw DomainError("standard category table needs at least 3 categories");
  }
  std::vector<Category> entries{{"void", false}, {"wall", false},
                                {"floor", false}};
  for (int k = 3; k < categories; ++k) {
    entries.push_back({"thing_" + std::to_string(k), true});
  }
  return CategoryTable(std::move(entries));
}

std::vector<int> CategoryTable::thing_ids() const {
  std::vector<int> ids;
  for (int k = 1; k < size(); ++k) {
    if (entries_[k].thing) ids.push_back(k);
  }
  return ids;
}

std::vector<int> CategoryTable::stuff_ids() const {
  std::vector<int> ids;
  for (int k = 1; k < size(); ++k) {
    if (!entries_[k].thing) ids.push_back(k);
  }
  return ids;
}

std::int64_t PanopticVolume::occupied_count() const {
  return std::count_if(semantic.begin(), semantic.end(),
                       [](std::uint16_t s) { return s != 0; });
}

void PanopticVolume::validate() const {
  const auto n = static_cast<std::size_t>(grid.cell_count());
  if (semantic.size() != n || instance.size() != n) {
    throw ShapeError("panoptic volume: label arrays do not match grid size");
  }
  for (std::size_t i = 0; i < n; ++i) {
    const int k = semantic[i];
    if (k >= categories.size()) {
      throw DomainError("panoptic volume: cell " + std::to_string(i) +
                        " has unknown category " + std::to_string(k));
    }
    if (instance[i] != 0 && !categories.is_thing(k)) {
      throw DomainError("panoptic volume: cell " + std::to_string(i) +
                        " has instance " + std::to_string(instance[i]) +
                        " but category " + std::to_string(k) +
                        " is not a thing");
    }
  }
}

void validate_scene(const SceneGT& scene) {
  scene.validate();
  std::unordered_map<std::uint32_t, int> category_of;
  for (std::size_t i = 0; i < scene.instance.size(); ++i) {
    const std::uint32_t id = scene.instance[i];
    if (id == 0) continue;
    const auto [it, inserted] = category_of.emplace(id, scene.semantic[i]);
    if (!inserted && it->second != scene.semantic[i]) {
      throw DomainError("scene: instance " + std::to_string(id) +
                        " spans categories " + std::to_string(it->second) +
                        " and " + std::to_string(scene.semantic[i]));
    }
  }
}

}  // namespace buol
