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

// Pinhole camera, depth-plane discretization and the two grid frames used for
// every volume in the library.
//
// Camera space is right-handed with +z forward, +x right and +y down, so image
// rows and the y axis grow in the same direction. Integer pixel indices address
// pixel centers; a continuous coordinate is mapped to a pixel by rounding half
// up and then bounds-checking.

#ifndef BUOL_GEOMETRY_HPP_
#define BUOL_GEOMETRY_HPP_

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <variant>

namespace buol {

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Point3&, const Point3&) = default;
};

// Continuous image coordinates plus metric depth.
struct PixelDepth {
  double u = 0.0;
  double v = 0.0;
  double z = 0.0;
};

struct CameraIntrinsics {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 1;
  int height = 1;

  // Throws DomainError unless fx, fy > 0, width, height >= 1 and the principal
  // point lies inside the image.
  void validate() const;

  friend bool operator==(const CameraIntrinsics&,
                         const CameraIntrinsics&) = default;
};

// M planes uniformly spaced in metric depth over [z_near, z_far). Plane m
// covers [z_near + m*dz, z_near + (m+1)*dz) and is centered at
// z_near + (m + 0.5)*dz.
struct DepthPlanes {
  int count = 128;
  double z_near = 0.4;
  double z_far = 6.0;

  void validate() const;
  double spacing() const { return (z_far - z_near) / count; }
  double center(int m) const { return z_near + (m + 0.5) * spacing(); }

  friend bool operator==(const DepthPlanes&, const DepthPlanes&) = default;
};

// K^-1 [u, v, 1] scaled by z. Throws DomainError for z <= 0.
Point3 backproject(double u, double v, double z, const CameraIntrinsics& camera);

// Continuous projection, no rounding. Throws DomainError for p.z <= 0.
PixelDepth project(const Point3& p, const CameraIntrinsics& camera);

// Plane containing depth z, or nullopt when z < z_near or z >= z_far.
std::optional<int> plane_index(double z, const DepthPlanes& planes);

// Index of the first plane whose center is >= z (the first plane that is not
// free space for a surface at depth z); planes.count when none is.
int first_plane_at_or_behind(double z, const DepthPlanes& planes);

inline int round_half_up(double x) {
  return static_cast<int>(std::floor(x + 0.5));
}

// Cells indexed by pixel (u, v) and plane m.
struct FrustumFrame {
  int width = 1;
  int height = 1;
  int planes = 1;

  friend bool operator==(const FrustumFrame&, const FrustumFrame&) = default;
};

// Metric grid in camera space. `origin` is the corner of cell (0, 0, 0); cell
// (i, j, k) spans origin + [i, i+1) * voxel_size along x and likewise in y, z.
struct AxisFrame {
  std::array<int, 3> dims{1, 1, 1};
  double voxel_size = 0.03;
  Point3 origin{};

  friend bool operator==(const AxisFrame&, const AxisFrame&) = default;
};

using GridFrame = std::variant<FrustumFrame, AxisFrame>;

struct CellIndex {
  int x = 0;
  int y = 0;
  int z = 0;

  friend bool operator==(const CellIndex&, const CellIndex&) = default;
};

// Storage extent of a grid. Layout is row-major over (y, x, z) with z fastest,
// i.e. one frustum ray (u, v) is a contiguous run of M cells.
struct Extent {
  int nx = 1;
  int ny = 1;
  int nz = 1;

  std::int64_t cells() const {
    return static_cast<std::int64_t>(nx) * ny * nz;
  }
  std::int64_t index(int x, int y, int z) const {
    return (static_cast<std::int64_t>(y) * nx + x) * nz + z;
  }
  CellIndex cell(std::int64_t index) const {
    const int z = static_cast<int>(index % nz);
    const std::int64_t column = index / nz;
    return {static_cast<int>(column % nx), static_cast<int>(column / nx), z};
  }
  bool contains(int x, int y, int z) const {
    return x >= 0 && x < nx && y >= 0 && y < ny && z >= 0 && z < nz;
  }

  friend bool operator==(const Extent&, const Extent&) = default;
};

// A grid frame bound to the camera and depth planes it was built for. Every
// volume in the library carries one.
class Grid {
 public:
  Grid() : Grid(CameraIntrinsics{}, DepthPlanes{1, 0.4, 6.0}) {}
  // Frustum grid covering the full image and all planes.
  Grid(const CameraIntrinsics& camera, const DepthPlanes& planes);
  // Throws DomainError on invalid frames and ShapeError when a frustum frame
  // disagrees with the camera image size or plane count.
  Grid(const GridFrame& frame, const CameraIntrinsics& camera,
       const DepthPlanes& planes);

  const GridFrame& frame() const { return frame_; }
  const CameraIntrinsics& camera() const { return camera_; }
  const DepthPlanes& planes() const { return planes_; }
  bool is_frustum() const {
    return std::holds_alternative<FrustumFrame>(frame_);
  }
  const Extent& extent() const { return extent_; }
  std::int64_t cell_count() const { return extent_.cells(); }

  Point3 cell_center(const CellIndex& c) const;
  // Cell containing p, or nullopt outside the grid.
  std::optional<CellIndex> locate(const Point3& p) const;

  bool same_camera(const Grid& other) const {
    return camera_ == other.camera_ && planes_ == other.planes_;
  }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  GridFrame frame_;
  CameraIntrinsics camera_;
  DepthPlanes planes_;
  Extent extent_;
};

// Pixel whose ray passes closest to the cell center (rounded half up, not
// bounds-checked); nullopt for cells at or behind the camera plane.
std::optional<std::array<int, 2>> pixel_of_cell(const Grid& grid,
                                                const CellIndex& cell);

// Axis-aligned grid with the given voxel size whose box encloses the whole
// camera frustum between z_near and z_far.
AxisFrame axis_frame_enclosing_frustum(const CameraIntrinsics& camera,
                                       const DepthPlanes& planes,
                                       double voxel_size);

}  // namespace buol

#endif  // BUOL_GEOMETRY_HPP_
