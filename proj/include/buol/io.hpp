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

// Binary volume containers and JSON scene manifests.
//
// Container layout, all integers and floats little-endian:
//
//   off  size  field
//     0     4  magic "BUOL"
//     4     2  version (1)
//     6     2  payload kind
//     8     2  element type
//    10     2  frame kind (0 image, 1 frustum, 2 axis)
//    12    12  dims nx, ny, nz (u32; images use nz = 1)
//    24     4  channels per cell (u32)
//    28    12  axis dims (u32; zero unless frame kind is axis)
//    40     8  axis voxel size (f64)
//    48    24  axis origin x, y, z (f64)
//    72    32  intrinsics fx, fy, cx, cy (f64)
//   104     8  image width, height (u32)
//   112     4  plane count (u32)
//   116    16  z_near, z_far (f64)
//   132     4  category count n (u32; panoptic volumes only, else 0)
//   136     n  thing flag per category (u8)
//   136+n   8  payload length in bytes (u64)
//   144+n      payload, cell-major with channels interleaved
//
// Panoptic payloads are u32 pairs (semantic, instance); feature volumes carry
// their C channels followed by one occupancy channel. Multi-plane occupancy is
// an image container with one channel per plane.

#ifndef BUOL_IO_HPP_
#define BUOL_IO_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "buol/geometry.hpp"
#include "buol/maps.hpp"
#include "buol/synth.hpp"
#include "buol/volume.hpp"

namespace buol {

inline constexpr std::uint16_t kContainerVersion = 1;

enum class PayloadKind : std::uint16_t {
  kSemanticVolume = 1,
  kPanopticVolume = 2,
  kFeatureVolume = 3,
  kMultiplane = 4,
  kDepth = 5,
  kHeatmap = 6,
  kOffsets = 7,
  kTsdf = 8,
  kSemanticMap = 9,
  kInstanceMap = 10,
};

enum class ElementType : std::uint16_t {
  kU8 = 1,
  kU16 = 2,
  kU32 = 3,
  kF32 = 4,
  kF64 = 5,
};

std::size_t element_size(ElementType type);
std::string to_string(PayloadKind kind);

enum class FrameKind : std::uint16_t { kImage = 0, kFrustum = 1, kAxis = 2 };

struct Container {
  PayloadKind kind = PayloadKind::kDepth;
  ElementType element = ElementType::kF64;
  FrameKind frame_kind = FrameKind::kImage;
  std::array<std::uint32_t, 3> dims{0, 0, 1};
  std::uint32_t channels = 1;
  AxisFrame axis{{0, 0, 0}, 0.0, {}};  // meaningful for kAxis only
  CameraIntrinsics camera;
  DepthPlanes planes;
  std::vector<std::uint8_t> thing_flags;
  std::vector<std::uint8_t> payload;

  // Frame the volume lives on; throws ParseError for image containers.
  Grid grid() const;

  friend bool operator==(const Container&, const Container&) = default;
};

std::vector<std::uint8_t> encode_container(const Container& c);
// Validates magic, version, enums, dims and payload length before copying the
// payload. Throws ParseError naming the byte offset and field.
Container decode_container(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path);
void write_bytes(const std::filesystem::path& path,
                 std::span<const std::uint8_t> bytes);

Container read_container(const std::filesystem::path& path);
void write_container(const std::filesystem::path& path, const Container& c);

// Typed conversions. The from_container functions throw ParseError when the
// container holds a different kind or element type.
Container to_container(const PanopticVolume& v);
Container to_container(const FeatureVolume& v);
Container to_container(const OffsetField3D& v);
Container semantic_volume_container(const PanopticVolume& v);
Container tsdf_container(std::span<const float> tsdf, const Grid& grid);
Container to_container(const SemanticMap2D& m, const CameraIntrinsics& camera,
                       const DepthPlanes& planes);
Container to_container(const DepthMap& m, const CameraIntrinsics& camera,
                       const DepthPlanes& planes);
Container to_container(const CenterHeatmap& m, const CameraIntrinsics& camera,
                       const DepthPlanes& planes);
Container to_container(const MultiPlaneOccupancy& m,
                       const CameraIntrinsics& camera,
                       const DepthPlanes& planes);
// Visible instance ids only; categories travel in the manifest's centers.
Container instance_map_container(const Raster<std::uint32_t>& ids,
                                 const CameraIntrinsics& camera,
                                 const DepthPlanes& planes);

PanopticVolume panoptic_from(const Container& c);
FeatureVolume feature_volume_from(const Container& c);
OffsetField3D offsets_from(const Container& c);
std::vector<float> tsdf_from(const Container& c);
SemanticMap2D semantic_map_from(const Container& c);
DepthMap depth_from(const Container& c);
CenterHeatmap heatmap_from(const Container& c);
MultiPlaneOccupancy multiplane_from(const Container& c);
Raster<std::uint32_t> instance_map_from(const Container& c);

// Human-readable scene description.
struct Manifest {
  CameraIntrinsics camera;
  DepthPlanes planes;
  CategoryTable categories;
  InstanceCenters centers;
  std::map<std::string, std::string> files;  // role -> path relative to it
  std::optional<SynthConfig> generator;

  friend bool operator==(const Manifest&, const Manifest&) = default;
};

std::string format_manifest(const Manifest& m);
// Throws ParseError naming the offending field.
Manifest parse_manifest(const std::string& text);

// Reads and parses the manifest, then checks that every referenced file
// exists and carries a valid container header.
Manifest load_manifest(const std::filesystem::path& path);
void save_manifest(const std::filesystem::path& path, const Manifest& m);

// Synthesis config in the manifest's "generator" syntax. Missing keys keep
// their defaults; unknown keys are rejected.
std::string format_synth_config(const SynthConfig& cfg);
SynthConfig parse_synth_config(const std::string& text);

}  // namespace buol

#endif  // BUOL_IO_HPP_
