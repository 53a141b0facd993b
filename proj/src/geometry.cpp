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

#include "buol/geometry.hpp"

#include <algorithm>
#include <string>

#include "buol/errors.hpp"

namespace buol {

void CameraIntrinsics::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) {
    throw DomainError("camera: focal lengths must be positive");
  }
  if (width < 1 || height < 1) {
    throw DomainError("camera: image size must be at least 1x1");
  }
  if (!(cx >= 0.0 && cx < width) || !(cy >= 0.0 && cy < height)) {
    throw DomainError("camera: principal point outside the image");
  }
}

void DepthPlanes::validate() const {
  if (count < 1) throw DomainError("planes: count must be >= 1");
  if (!(z_near > 0.0) || !(z_far > z_near)) {
    throw DomainError("planes: require 0 < z_near < z_far");
  }
}

Point3 backproject(double u, double v, double z,
                   const CameraIntrinsics& camera) {
  if (!(z > 0.0)) {
    throw DomainError("backproject: depth must be positive, got " +
                      std::to_string(z));
  }
  return {z * (u - camera.cx) / camera.fx, z * (v - camera.cy) / camera.fy, z};
}

PixelDepth project(const Point3& p, const CameraIntrinsics& camera) {
  if (!(p.z > 0.0)) {
    throw DomainError("project: point is behind the camera (z = " +
                      std::to_string(p.z) + ")");
  }
  return {camera.fx * p.x / p.z + camera.cx, camera.fy * p.y / p.z + camera.cy,
          p.z};
}

std::optional<int> plane_index(double z, const DepthPlanes& planes) {
  if (!(z >= planes.z_near) || !(z < planes.z_far)) return std::nullopt;
  const double t =
      (z - planes.z_near) * planes.count / (planes.z_far - planes.z_near);
  // Rounding can push t to exactly count for z just below z_far.
  return std::min(static_cast<int>(std::floor(t)), planes.count - 1);
}

int first_plane_at_or_behind(double z, const DepthPlanes& planes) {
  const double t = (z - planes.z_near) / planes.spacing() - 0.5;
  int m = static_cast<int>(
      std::clamp(std::ceil(t), 0.0, static_cast<double>(planes.count)));
  while (m > 0 && planes.center(m - 1) >= z) --m;
  while (m < planes.count && planes.center(m) < z) ++m;
  return m;
}

namespace {

Extent extent_of(const GridFrame& frame) {
  if (const auto* f = std::get_if<FrustumFrame>(&frame)) {
    return {f->width, f->height, f->planes};
  }
  const auto& a = std::get<AxisFrame>(frame);
  return {a.dims[0], a.dims[1], a.dims[2]};
}

}  // namespace

Grid::Grid(const CameraIntrinsics& camera, const DepthPlanes& planes)
    : Grid(FrustumFrame{camera.width, camera.height, planes.count}, camera,
           planes) {}

Grid::Grid(const GridFrame& frame, const CameraIntrinsics& camera,
           const DepthPlanes& planes)
    : frame_(frame), camera_(camera), planes_(planes), extent_(extent_of(frame)) {
  camera_.validate();
  planes_.validate();
  if (extent_.nx < 1 || extent_.ny < 1 || extent_.nz < 1) {
    throw DomainError("grid: all dimensions must be >= 1");
  }
  if (const auto* f = std::get_if<FrustumFrame>(&frame_)) {
    if (f->width != camera_.width || f->height != camera_.height ||
        f->planes != planes_.count) {
      throw ShapeError("grid: frustum frame does not match camera/planes");
    }
  } else if (!(std::get<AxisFrame>(frame_).voxel_size > 0.0)) {
    throw DomainError("grid: voxel size must be positive");
  }
}

Point3 Grid::cell_center(const CellIndex& c) const {
  if (is_frustum()) {
    return backproject(c.x, c.y, planes_.center(c.z), camera_);
  }
  const auto& a = std::get<AxisFrame>(frame_);
  return {a.origin.x + (c.x + 0.5) * a.voxel_size,
          a.origin.y + (c.y + 0.5) * a.voxel_size,
          a.origin.z + (c.z + 0.5) * a.voxel_size};
}

std::optional<CellIndex> Grid::locate(const Point3& p) const {
  if (is_frustum()) {
    if (!(p.z > 0.0)) return std::nullopt;
    const PixelDepth q = project(p, camera_);
    const auto m = plane_index(q.z, planes_);
    if (!m) return std::nullopt;
    const int u = round_half_up(q.u);
    const int v = round_half_up(q.v);
    if (!extent_.contains(u, v, *m)) return std::nullopt;
    return CellIndex{u, v, *m};
  }
  const auto& a = std::get<AxisFrame>(frame_);
  const double fx = std::floor((p.x - a.origin.x) / a.voxel_size);
  const double fy = std::floor((p.y - a.origin.y) / a.voxel_size);
  const double fz = std::floor((p.z - a.origin.z) / a.voxel_size);
  if (fx < 0 || fy < 0 || fz < 0 || fx >= extent_.nx || fy >= extent_.ny ||
      fz >= extent_.nz) {
    return std::nullopt;
  }
  return CellIndex{static_cast<int>(fx), static_cast<int>(fy),
                   static_cast<int>(fz)};
}

std::optional<std::array<int, 2>> pixel_of_cell(const Grid& grid,
                                                const CellIndex& cell) {
  if (grid.is_frustum()) return std::array<int, 2>{cell.x, cell.y};
  const Point3 p = grid.cell_center(cell);
  if (!(p.z > 0.0)) return std::nullopt;
  const PixelDepth q = project(p, grid.camera());
  return std::array<int, 2>{round_half_up(q.u), round_half_up(q.v)};
}

AxisFrame axis_frame_enclosing_frustum(const CameraIntrinsics& camera,
                                       const DepthPlanes& planes,
                                       double voxel_size) {
  if (!(voxel_size > 0.0)) throw DomainError("voxel size must be positive");
  // Extreme pixel edges at the far plane bound the frustum laterally.
  const Point3 lo = backproject(-0.5, -0.5, planes.z_far, camera);
  const Point3 hi = backproject(camera.width - 0.5, camera.height - 0.5,
                                planes.z_far, camera);
  const double x0 = std::min(lo.x, 0.0);
  const double y0 = std::min(lo.y, 0.0);
  const double x1 = std::max(hi.x, 0.0);
  const double y1 = std::max(hi.y, 0.0);
  AxisFrame frame;
  frame.voxel_size = voxel_size;
  frame.origin = {x0, y0, planes.z_near};
  frame.dims = {static_cast<int>(std::ceil((x1 - x0) / voxel_size)),
                static_cast<int>(std::ceil((y1 - y0) / voxel_size)),
                static_cast<int>(
                    std::ceil((planes.z_far - planes.z_near) / voxel_size))};
  for (int& d : frame.dims) d = std::max(d, 1);
  return frame;
}

}  // namespace buol
