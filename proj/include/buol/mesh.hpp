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

// Wavefront OBJ/MTL export of a panoptic volume as voxel boundary faces.
//
// Every face of an occupied cell whose neighbor belongs to a different
// segment (or is free) becomes two triangles in camera-space meters. Frustum
// cells are the truncated pyramids between their pixel corners and plane
// boundaries. Each segment gets a material: "stuff_<k>" or "instance_<id>",
// colored by a hash of the category or instance id.

#ifndef BUOL_MESH_HPP_
#define BUOL_MESH_HPP_

#include <array>
#include <cstdint>
#include <string>

#include "buol/volume.hpp"

namespace buol {

struct MeshText {
  std::string obj;
  std::string mtl;
  std::int64_t triangles = 0;
};

// `mtl_name` is the file name written into the OBJ's mtllib line.
MeshText export_mesh(const PanopticVolume& volume, const std::string& mtl_name);

// Deterministic RGB in [0.2, 1) per key.
std::array<double, 3> segment_color(std::uint64_t key);

}  // namespace buol

#endif  // BUOL_MESH_HPP_
