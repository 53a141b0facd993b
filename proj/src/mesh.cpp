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

#include "buol/mesh.hpp"

#include <cstdio>
#include <map>
#include <vector>

#include "buol/geometry.hpp"
#include "buol/rng.hpp"

namespace buol {

namespace {

// Corner offsets of each face, counter-clockwise seen from outside.
constexpr std::array<std::array<std::array<int, 3>, 4>, 6> kFaces{{
    {{{1, 0, 0}, {1, 1, 0}, {1, 1, 1}, {1, 0, 1}}},  // +x
    {{{0, 0, 0}, {0, 0, 1}, {0, 1, 1}, {0, 1, 0}}},  // -x
    {{{0, 1, 0}, {0, 1, 1}, {1, 1, 1}, {1, 1, 0}}},  // +y
    {{{0, 0, 0}, {1, 0, 0}, {1, 0, 1}, {0, 0, 1}}},  // -y
    {{{0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}}},  // +z
    {{{0, 0, 0}, {0, 1, 0}, {1, 1, 0}, {1, 0, 0}}},  // -z
}};
constexpr std::array<std::array<int, 3>, 6> kNormals{
    {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}}};

// Corner (x, y, z) of the lattice, i.e. the low corner of that cell.
Point3 lattice_point(const Grid& grid, int x, int y, int z) {
  if (grid.is_frustum()) {
    const DepthPlanes& p = grid.planes();
    const double depth = p.z_near + z * p.spacing();
    return backproject(x - 0.5, y - 0.5, depth, grid.camera());
  }
  const AxisFrame& a = std::get<AxisFrame>(grid.frame());
  return {a.origin.x + x * a.voxel_size, a.origin.y + y * a.voxel_size,
          a.origin.z + z * a.voxel_size};
}

std::uint64_t segment_key(const PanopticVolume& v, std::int64_t i) {
  return (static_cast<std::uint64_t>(v.semantic[i]) << 32) | v.instance[i];
}

}  // namespace

std::array<double, 3> segment_color(std::uint64_t key) {
  const std::uint64_t h = splitmix64(key);
  std::array<double, 3> rgb{};
  for (int c = 0; c < 3; ++c) {
    rgb[c] = 0.2 + 0.8 * static_cast<double>((h >> (16 * c)) & 0xffff) / 65536.0;
  }
  return rgb;
}

MeshText export_mesh(const PanopticVolume& volume, const std::string& mtl_name) {
  const Grid& grid = volume.grid;
  const Extent& e = grid.extent();
  // segment key -> quads as 4 lattice corners
  std::map<std::uint64_t, std::vector<std::array<CellIndex, 4>>> quads;
  for (std::int64_t i = 0; i < e.cells(); ++i) {
    if (!volume.occupied(i)) continue;
    const CellIndex c = e.cell(i);
    const std::uint64_t key = segment_key(volume, i);
    for (int f = 0; f < 6; ++f) {
      const int nx = c.x + kNormals[f][0], ny = c.y + kNormals[f][1],
                nz = c.z + kNormals[f][2];
      if (e.contains(nx, ny, nz) &&
          segment_key(volume, e.index(nx, ny, nz)) == key) {
        continue;
      }
      std::array<CellIndex, 4> q;
      for (int k = 0; k < 4; ++k) {
        q[k] = {c.x + kFaces[f][k][0], c.y + kFaces[f][k][1],
                c.z + kFaces[f][k][2]};
      }
      quads[key].push_back(q);
    }
  }

  MeshText out;
  char line[160];
  out.mtl = "# buol segment materials\n";
  out.obj = "# buol voxel mesh\nmtllib " + mtl_name + "\n";
  std::map<std::array<int, 3>, std::int64_t> vertex_ids;
  std::string faces;
  for (const auto& [key, list] : quads) {
    const auto category = static_cast<std::uint32_t>(key >> 32);
    const auto instance = static_cast<std::uint32_t>(key & 0xffffffffu);
    const std::string name = instance == 0
                                 ? "stuff_" + std::to_string(category)
                                 : "instance_" + std::to_string(instance);
    const auto rgb = segment_color(instance == 0 ? category : (1ULL << 40) | instance);
    std::snprintf(line, sizeof line, "newmtl %s\nKd %.6f %.6f %.6f\n\n",
                  name.c_str(), rgb[0], rgb[1], rgb[2]);
    out.mtl += line;
    faces += "usemtl " + name + "\n";
    for (const auto& q : list) {
      std::array<std::int64_t, 4> ids{};
      for (int k = 0; k < 4; ++k) {
        const std::array<int, 3> corner{q[k].x, q[k].y, q[k].z};
        auto [it, inserted] = vertex_ids.try_emplace(
            corner, static_cast<std::int64_t>(vertex_ids.size()) + 1);
        if (inserted) {
          const Point3 p = lattice_point(grid, corner[0], corner[1], corner[2]);
          std::snprintf(line, sizeof line, "v %.9g %.9g %.9g\n", p.x, p.y, p.z);
          out.obj += line;
        }
        ids[k] = it->second;
      }
      std::snprintf(line, sizeof line, "f %lld %lld %lld\nf %lld %lld %lld\n",
                    static_cast<long long>(ids[0]), static_cast<long long>(ids[1]),
                    static_cast<long long>(ids[2]), static_cast<long long>(ids[0]),
                    static_cast<long long>(ids[2]), static_cast<long long>(ids[3]));
      faces += line;
      out.triangles += 2;
    }
  }
  out.obj += faces;
  return out;
}

}  // namespace buol
