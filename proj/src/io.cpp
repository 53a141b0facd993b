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

#include "buol/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>
#include <type_traits>

#include <json.hpp>

#include "buol/errors.hpp"

namespace buol {

namespace {

using nlohmann::json;

constexpr std::array<std::uint8_t, 4> kMagic{'B', 'U', 'O', 'L'};

class Writer {
 public:
  template <typename T>
  void put(T value) {
    static_assert(std::is_arithmetic_v<T>);
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
              std::conditional_t<sizeof(T) == 4, std::uint32_t,
              std::conditional_t<sizeof(T) == 2, std::uint16_t, std::uint8_t>>>;
    const U bits = std::bit_cast<U>(value);
    for (std::size_t b = 0; b < sizeof(T); ++b) {
      bytes_.push_back(static_cast<std::uint8_t>(bits >> (8 * b)));
    }
  }
  void put_bytes(std::span<const std::uint8_t> data) {
    bytes_.insert(bytes_.end(), data.begin(), data.end());
  }
  std::vector<std::uint8_t> take() { return std::move(bytes_); }

 private:
  std::vector<std::uint8_t> bytes_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  template <typename T>
  T get(const char* field) {
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
              std::conditional_t<sizeof(T) == 4, std::uint32_t,
              std::conditional_t<sizeof(T) == 2, std::uint16_t, std::uint8_t>>>;
    need(sizeof(T), field);
    U bits = 0;
    for (std::size_t b = 0; b < sizeof(T); ++b) {
      bits |= static_cast<U>(static_cast<U>(bytes_[pos_ + b]) << (8 * b));
    }
    pos_ += sizeof(T);
    return std::bit_cast<T>(bits);
  }

  std::span<const std::uint8_t> take(std::size_t n, const char* field) {
    need(n, field);
    auto out = bytes_.subspan(pos_, n);
    pos_ += n;
    return out;
  }

  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

  [[noreturn]] void fail(std::size_t at, const char* field,
                         const std::string& what) const {
    throw ParseError("container: offset " + std::to_string(at) + ", field " +
                     field + ": " + what);
  }

 private:
  void need(std::size_t n, const char* field) const {
    if (remaining() < n) {
      fail(pos_, field,
           "truncated (need " + std::to_string(n) + " bytes, have " +
               std::to_string(remaining()) + ")");
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

struct KindShape {
  ElementType element;
  bool volume;        // frustum or axis frame
  int channels = -1;  // fixed channel count, -1 when free
};

KindShape shape_of(PayloadKind kind) {
  switch (kind) {
    case PayloadKind::kSemanticVolume: return {ElementType::kU16, true, 1};
    case PayloadKind::kPanopticVolume: return {ElementType::kU32, true, 2};
    case PayloadKind::kFeatureVolume: return {ElementType::kF32, true, -1};
    case PayloadKind::kMultiplane: return {ElementType::kF64, false, -1};
    case PayloadKind::kDepth: return {ElementType::kF64, false, 1};
    case PayloadKind::kHeatmap: return {ElementType::kF64, false, 1};
    case PayloadKind::kOffsets: return {ElementType::kF32, true, 2};
    case PayloadKind::kTsdf: return {ElementType::kF32, true, 1};
    case PayloadKind::kSemanticMap: return {ElementType::kF64, false, -1};
    case PayloadKind::kInstanceMap: return {ElementType::kU32, false, 1};
  }
  throw ParseError("container: unknown payload kind");
}

bool valid_kind(std::uint16_t k) { return k >= 1 && k <= 10; }
bool valid_element(std::uint16_t e) { return e >= 1 && e <= 5; }

template <typename T>
std::vector<std::uint8_t> pack(std::span<const T> values) {
  Writer w;
  for (T x : values) w.put(x);
  return w.take();
}

template <typename T>
std::vector<T> unpack(std::span<const std::uint8_t> bytes) {
  std::vector<T> out(bytes.size() / sizeof(T));
  Reader r(bytes);
  for (T& x : out) x = r.get<T>("payload");
  return out;
}

Container volume_header(PayloadKind kind, const Grid& grid,
                        std::uint32_t channels) {
  Container c;
  c.kind = kind;
  c.element = shape_of(kind).element;
  c.channels = channels;
  c.camera = grid.camera();
  c.planes = grid.planes();
  const Extent& e = grid.extent();
  c.dims = {static_cast<std::uint32_t>(e.nx), static_cast<std::uint32_t>(e.ny),
            static_cast<std::uint32_t>(e.nz)};
  if (grid.is_frustum()) {
    c.frame_kind = FrameKind::kFrustum;
  } else {
    c.frame_kind = FrameKind::kAxis;
    c.axis = std::get<AxisFrame>(grid.frame());
  }
  return c;
}

template <typename R>
Container image_container(PayloadKind kind, const R& m,
                          const CameraIntrinsics& camera,
                          const DepthPlanes& planes) {
  if (m.width != camera.width || m.height != camera.height) {
    throw ShapeError("container: map size " + std::to_string(m.width) + "x" +
                     std::to_string(m.height) +
                     " differs from the camera image size");
  }
  Container c;
  c.kind = kind;
  c.element = shape_of(kind).element;
  c.frame_kind = FrameKind::kImage;
  c.dims = {static_cast<std::uint32_t>(m.width),
            static_cast<std::uint32_t>(m.height), 1};
  c.channels = static_cast<std::uint32_t>(m.channels);
  c.camera = camera;
  c.planes = planes;
  using T = typename decltype(m.data)::value_type;
  c.payload = pack(std::span<const T>(m.data));
  return c;
}

void expect_kind(const Container& c, PayloadKind kind) {
  if (c.kind != kind) {
    throw ParseError("container: expected payload kind " + to_string(kind) +
                     ", found " + to_string(c.kind));
  }
}

template <typename R>
R image_from(const Container& c, PayloadKind kind) {
  expect_kind(c, kind);
  R m(static_cast<int>(c.dims[0]), static_cast<int>(c.dims[1]),
      static_cast<int>(c.channels));
  m.data = unpack<typename decltype(m.data)::value_type>(c.payload);
  return m;
}

}  // namespace

std::size_t element_size(ElementType type) {
  switch (type) {
    case ElementType::kU8: return 1;
    case ElementType::kU16: return 2;
    case ElementType::kU32: return 4;
    case ElementType::kF32: return 4;
    case ElementType::kF64: return 8;
  }
  return 0;
}

std::string to_string(PayloadKind kind) {
  switch (kind) {
    case PayloadKind::kSemanticVolume: return "semantic-volume";
    case PayloadKind::kPanopticVolume: return "panoptic-volume";
    case PayloadKind::kFeatureVolume: return "feature-volume";
    case PayloadKind::kMultiplane: return "multiplane";
    case PayloadKind::kDepth: return "depth";
    case PayloadKind::kHeatmap: return "heatmap";
    case PayloadKind::kOffsets: return "offsets";
    case PayloadKind::kTsdf: return "tsdf";
    case PayloadKind::kSemanticMap: return "semantic-map";
    case PayloadKind::kInstanceMap: return "instance-map";
  }
  return "unknown";
}

Grid Container::grid() const {
  switch (frame_kind) {
    case FrameKind::kFrustum:
      return Grid(FrustumFrame{static_cast<int>(dims[0]),
                               static_cast<int>(dims[1]),
                               static_cast<int>(dims[2])},
                  camera, planes);
    case FrameKind::kAxis:
      return Grid(axis, camera, planes);
    case FrameKind::kImage:
      break;
  }
  throw ParseError("container: " + to_string(kind) + " has no 3D frame");
}

std::vector<std::uint8_t> encode_container(const Container& c) {
  Writer w;
  w.put_bytes(kMagic);
  w.put(kContainerVersion);
  w.put(static_cast<std::uint16_t>(c.kind));
  w.put(static_cast<std::uint16_t>(c.element));
  w.put(static_cast<std::uint16_t>(c.frame_kind));
  for (std::uint32_t d : c.dims) w.put(d);
  w.put(c.channels);
  for (int d : c.axis.dims) w.put(static_cast<std::uint32_t>(d));
  w.put(c.axis.voxel_size);
  w.put(c.axis.origin.x);
  w.put(c.axis.origin.y);
  w.put(c.axis.origin.z);
  w.put(c.camera.fx);
  w.put(c.camera.fy);
  w.put(c.camera.cx);
  w.put(c.camera.cy);
  w.put(static_cast<std::uint32_t>(c.camera.width));
  w.put(static_cast<std::uint32_t>(c.camera.height));
  w.put(static_cast<std::uint32_t>(c.planes.count));
  w.put(c.planes.z_near);
  w.put(c.planes.z_far);
  w.put(static_cast<std::uint32_t>(c.thing_flags.size()));
  w.put_bytes(c.thing_flags);
  w.put(static_cast<std::uint64_t>(c.payload.size()));
  w.put_bytes(c.payload);
  return w.take();
}

Container decode_container(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  Container c;
  std::optional<std::size_t> multiplane_channels_at;
  auto magic = r.take(4, "magic");
  if (!std::equal(magic.begin(), magic.end(), kMagic.begin())) {
    r.fail(0, "magic", "expected \"BUOL\"");
  }
  std::size_t at = r.pos();
  const auto version = r.get<std::uint16_t>("version");
  if (version != kContainerVersion) {
    r.fail(at, "version", "unsupported version " + std::to_string(version));
  }
  at = r.pos();
  const auto kind = r.get<std::uint16_t>("kind");
  if (!valid_kind(kind)) r.fail(at, "kind", "unknown value " + std::to_string(kind));
  c.kind = static_cast<PayloadKind>(kind);
  const KindShape shape = shape_of(c.kind);
  at = r.pos();
  const auto element = r.get<std::uint16_t>("element");
  if (!valid_element(element)) {
    r.fail(at, "element", "unknown value " + std::to_string(element));
  }
  c.element = static_cast<ElementType>(element);
  if (c.element != shape.element) {
    r.fail(at, "element", "wrong element type for " + to_string(c.kind));
  }
  at = r.pos();
  const auto frame = r.get<std::uint16_t>("frame");
  if (frame > 2) r.fail(at, "frame", "unknown value " + std::to_string(frame));
  c.frame_kind = static_cast<FrameKind>(frame);
  if (shape.volume == (c.frame_kind == FrameKind::kImage)) {
    r.fail(at, "frame", "frame kind does not fit " + to_string(c.kind));
  }
  const std::size_t dims_at = r.pos();
  for (auto& d : c.dims) d = r.get<std::uint32_t>("dims");
  for (auto d : c.dims) {
    if (d == 0) r.fail(dims_at, "dims", "zero extent");
  }
  at = r.pos();
  c.channels = r.get<std::uint32_t>("channels");
  if (c.channels == 0 ||
      (shape.channels > 0 && c.channels != static_cast<std::uint32_t>(shape.channels)) ||
      (c.kind == PayloadKind::kFeatureVolume && c.channels < 2)) {
    r.fail(at, "channels", "invalid count " + std::to_string(c.channels));
  }
  if (c.kind == PayloadKind::kMultiplane) multiplane_channels_at = at;
  const std::size_t axis_at = r.pos();
  for (int& d : c.axis.dims) d = static_cast<int>(r.get<std::uint32_t>("axis.dims"));
  c.axis.voxel_size = r.get<double>("axis.voxel_size");
  c.axis.origin.x = r.get<double>("axis.origin");
  c.axis.origin.y = r.get<double>("axis.origin");
  c.axis.origin.z = r.get<double>("axis.origin");
  const std::size_t cam_at = r.pos();
  c.camera.fx = r.get<double>("camera.fx");
  c.camera.fy = r.get<double>("camera.fy");
  c.camera.cx = r.get<double>("camera.cx");
  c.camera.cy = r.get<double>("camera.cy");
  c.camera.width = static_cast<int>(r.get<std::uint32_t>("camera.width"));
  c.camera.height = static_cast<int>(r.get<std::uint32_t>("camera.height"));
  const std::size_t planes_at = r.pos();
  c.planes.count = static_cast<int>(r.get<std::uint32_t>("planes.count"));
  c.planes.z_near = r.get<double>("planes.z_near");
  c.planes.z_far = r.get<double>("planes.z_far");
  try {
    c.camera.validate();
  } catch (const DomainError& e) {
    r.fail(cam_at, "camera", e.what());
  }
  try {
    c.planes.validate();
  } catch (const DomainError& e) {
    r.fail(planes_at, "planes", e.what());
  }
  if (multiplane_channels_at &&
      c.channels != static_cast<std::uint32_t>(c.planes.count)) {
    r.fail(*multiplane_channels_at, "channels", "must equal the plane count");
  }
  if (c.frame_kind == FrameKind::kAxis) {
    for (int i = 0; i < 3; ++i) {
      if (c.axis.dims[i] != static_cast<int>(c.dims[i])) {
        r.fail(axis_at, "axis.dims", "disagrees with dims");
      }
    }
    if (!(c.axis.voxel_size > 0.0) || !std::isfinite(c.axis.voxel_size)) {
      r.fail(axis_at + 12, "axis.voxel_size", "must be positive");
    }
  } else {
    if (c.axis != AxisFrame{{0, 0, 0}, 0.0, {}}) {
      r.fail(axis_at, "axis", "must be zero for non-axis frames");
    }
    const std::uint32_t w = static_cast<std::uint32_t>(c.camera.width);
    const std::uint32_t h = static_cast<std::uint32_t>(c.camera.height);
    const std::uint32_t nz =
        c.frame_kind == FrameKind::kFrustum
            ? static_cast<std::uint32_t>(c.planes.count) : 1u;
    if (c.dims != std::array<std::uint32_t, 3>{w, h, nz}) {
      r.fail(dims_at, "dims", "disagree with the camera image or plane count");
    }
  }
  at = r.pos();
  const auto n_categories = r.get<std::uint32_t>("categories");
  const bool panoptic = c.kind == PayloadKind::kPanopticVolume;
  if (panoptic ? n_categories == 0 : n_categories != 0) {
    r.fail(at, "categories", "invalid count " + std::to_string(n_categories));
  }
  at = r.pos();
  auto flags = r.take(n_categories, "thing_flags");
  c.thing_flags.assign(flags.begin(), flags.end());
  for (std::size_t k = 0; k < c.thing_flags.size(); ++k) {
    if (c.thing_flags[k] > 1 || (k == 0 && c.thing_flags[k] != 0)) {
      r.fail(at + k, "thing_flags", "invalid flag");
    }
  }
  at = r.pos();
  const auto length = r.get<std::uint64_t>("payload_length");
  const std::uint64_t expected = static_cast<std::uint64_t>(c.dims[0]) *
                                 c.dims[1] * c.dims[2] * c.channels *
                                 element_size(c.element);
  if (length != expected) {
    r.fail(at, "payload_length",
           std::to_string(length) + " != expected " + std::to_string(expected));
  }
  if (r.remaining() != length) {
    r.fail(r.pos(), "payload",
           "has " + std::to_string(r.remaining()) + " bytes, header says " +
               std::to_string(length));
  }
  auto payload = r.take(static_cast<std::size_t>(length), "payload");
  c.payload.assign(payload.begin(), payload.end());
  return c;
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
  if (std::filesystem::is_directory(path)) {
    throw ParseError(path.string() + " is a directory, expected a file");
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const std::filesystem::path& path,
                 std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write failed: " + path.string());
}

Container read_container(const std::filesystem::path& path) {
  const auto bytes = read_bytes(path);
  try {
    return decode_container(bytes);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_container(const std::filesystem::path& path, const Container& c) {
  write_bytes(path, encode_container(c));
}

Container to_container(const PanopticVolume& v) {
  Container c = volume_header(PayloadKind::kPanopticVolume, v.grid, 2);
  for (int k = 0; k < v.categories.size(); ++k) {
    c.thing_flags.push_back(v.categories[k].thing ? 1 : 0);
  }
  Writer w;
  for (std::size_t i = 0; i < v.semantic.size(); ++i) {
    w.put(static_cast<std::uint32_t>(v.semantic[i]));
    w.put(v.instance[i]);
  }
  c.payload = w.take();
  return c;
}

Container semantic_volume_container(const PanopticVolume& v) {
  Container c = volume_header(PayloadKind::kSemanticVolume, v.grid, 1);
  c.payload = pack(std::span<const std::uint16_t>(v.semantic));
  return c;
}

Container to_container(const FeatureVolume& v) {
  Container c = volume_header(PayloadKind::kFeatureVolume, v.grid,
                              static_cast<std::uint32_t>(v.channels + 1));
  Writer w;
  for (std::int64_t i = 0; i < v.grid.cell_count(); ++i) {
    for (float x : v.cell(i)) w.put(x);
    w.put(v.occupancy[i]);
  }
  c.payload = w.take();
  return c;
}

Container to_container(const OffsetField3D& v) {
  Container c = volume_header(PayloadKind::kOffsets, v.grid, 2);
  c.payload = pack(std::span<const float>(v.offsets));
  return c;
}

Container tsdf_container(std::span<const float> tsdf, const Grid& grid) {
  if (static_cast<std::int64_t>(tsdf.size()) != grid.cell_count()) {
    throw ShapeError("container: tsdf size differs from the grid");
  }
  Container c = volume_header(PayloadKind::kTsdf, grid, 1);
  c.payload = pack(tsdf);
  return c;
}

Container to_container(const SemanticMap2D& m, const CameraIntrinsics& camera,
                       const DepthPlanes& planes) {
  return image_container(PayloadKind::kSemanticMap, m, camera, planes);
}
Container to_container(const DepthMap& m, const CameraIntrinsics& camera,
                       const DepthPlanes& planes) {
  return image_container(PayloadKind::kDepth, m, camera, planes);
}
Container to_container(const CenterHeatmap& m, const CameraIntrinsics& camera,
                       const DepthPlanes& planes) {
  return image_container(PayloadKind::kHeatmap, m, camera, planes);
}
Container to_container(const MultiPlaneOccupancy& m,
                       const CameraIntrinsics& camera,
                       const DepthPlanes& planes) {
  return image_container(PayloadKind::kMultiplane, m, camera, planes);
}

Container instance_map_container(const Raster<std::uint32_t>& ids,
                                 const CameraIntrinsics& camera,
                                 const DepthPlanes& planes) {
  return image_container(PayloadKind::kInstanceMap, ids, camera, planes);
}

PanopticVolume panoptic_from(const Container& c) {
  expect_kind(c, PayloadKind::kPanopticVolume);
  const int n = static_cast<int>(c.thing_flags.size());
  // Names are not stored; the standard table is recognized by its flags.
  CategoryTable table;
  bool standard = n >= 3;
  if (standard) {
    const CategoryTable s = CategoryTable::standard(n);
    for (int k = 0; k < n; ++k) standard &= s[k].thing == (c.thing_flags[k] != 0);
    if (standard) table = s;
  }
  if (!standard) {
    std::vector<Category> entries{{"void", false}};
    for (int k = 1; k < n; ++k) {
      entries.push_back({"category_" + std::to_string(k), c.thing_flags[k] != 0});
    }
    table = CategoryTable(std::move(entries));
  }
  PanopticVolume v(c.grid(), table);
  const auto words = unpack<std::uint32_t>(c.payload);
  for (std::size_t i = 0; i < v.semantic.size(); ++i) {
    if (words[2 * i] >= static_cast<std::uint32_t>(n)) {
      throw ParseError("container: payload cell " + std::to_string(i) +
                       ": semantic label out of range");
    }
    v.semantic[i] = static_cast<std::uint16_t>(words[2 * i]);
    v.instance[i] = words[2 * i + 1];
  }
  try {
    v.validate();
  } catch (const Error& e) {
    throw ParseError(std::string("container: payload: ") + e.what());
  }
  return v;
}

FeatureVolume feature_volume_from(const Container& c) {
  expect_kind(c, PayloadKind::kFeatureVolume);
  FeatureVolume v(c.grid(), static_cast<int>(c.channels) - 1);
  const auto values = unpack<float>(c.payload);
  std::size_t p = 0;
  for (std::int64_t i = 0; i < v.grid.cell_count(); ++i) {
    for (float& x : v.cell(i)) x = values[p++];
    v.occupancy[i] = values[p++];
  }
  return v;
}

OffsetField3D offsets_from(const Container& c) {
  expect_kind(c, PayloadKind::kOffsets);
  OffsetField3D v(c.grid());
  v.offsets = unpack<float>(c.payload);
  return v;
}

std::vector<float> tsdf_from(const Container& c) {
  expect_kind(c, PayloadKind::kTsdf);
  return unpack<float>(c.payload);
}

SemanticMap2D semantic_map_from(const Container& c) {
  return image_from<SemanticMap2D>(c, PayloadKind::kSemanticMap);
}
DepthMap depth_from(const Container& c) {
  return image_from<DepthMap>(c, PayloadKind::kDepth);
}
CenterHeatmap heatmap_from(const Container& c) {
  return image_from<CenterHeatmap>(c, PayloadKind::kHeatmap);
}
MultiPlaneOccupancy multiplane_from(const Container& c) {
  return image_from<MultiPlaneOccupancy>(c, PayloadKind::kMultiplane);
}
Raster<std::uint32_t> instance_map_from(const Container& c) {
  return image_from<Raster<std::uint32_t>>(c, PayloadKind::kInstanceMap);
}

// ---------------------------------------------------------------------------
// Manifest

namespace {

// Reads `key` of object `j` as T, naming `path.key` on failure.
template <typename T>
T field(const json& j, const std::string& path, const std::string& key) {
  const std::string name = path.empty() ? key : path + "." + key;
  if (!j.is_object() || !j.contains(key)) {
    throw ParseError("manifest: missing field " + name);
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ParseError("manifest: field " + name + " has the wrong type");
  }
}

template <typename T>
void optional_field(const json& j, const std::string& path,
                    const std::string& key, T& out) {
  if (j.contains(key)) out = field<T>(j, path, key);
}

json synth_to_json(const SynthConfig& cfg) {
  return {
      {"seed", cfg.seed},
      {"width", cfg.width},
      {"height", cfg.height},
      {"planes", cfg.planes},
      {"z_near", cfg.z_near},
      {"z_far", cfg.z_far},
      {"categories", cfg.categories},
      {"things", cfg.things},
      {"stuff", cfg.stuff},
      {"min_separation", cfg.min_separation},
      {"allow_occlusion", cfg.allow_occlusion},
      {"max_attempts", cfg.max_attempts},
      {"noise",
       {{"depth_sigma", cfg.noise.depth_sigma},
        {"semantic_flip", cfg.noise.semantic_flip},
        {"occupancy_flip", cfg.noise.occupancy_flip},
        {"center_jitter", cfg.noise.center_jitter}}},
  };
}

void reject_unknown(const json& j, const std::string& path,
                    const std::set<std::string>& known) {
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) {
      throw ParseError("manifest: unknown field " +
                       (path.empty() ? key : path + "." + key));
    }
  }
}

SynthConfig synth_from_json(const json& j, const std::string& path) {
  if (!j.is_object()) throw ParseError("manifest: " + path + " must be an object");
  reject_unknown(j, path,
                 {"seed", "width", "height", "planes", "z_near", "z_far",
                  "categories", "things", "stuff", "min_separation",
                  "allow_occlusion", "max_attempts", "noise"});
  SynthConfig cfg;
  optional_field(j, path, "seed", cfg.seed);
  optional_field(j, path, "width", cfg.width);
  optional_field(j, path, "height", cfg.height);
  optional_field(j, path, "planes", cfg.planes);
  optional_field(j, path, "z_near", cfg.z_near);
  optional_field(j, path, "z_far", cfg.z_far);
  optional_field(j, path, "categories", cfg.categories);
  optional_field(j, path, "things", cfg.things);
  optional_field(j, path, "stuff", cfg.stuff);
  optional_field(j, path, "min_separation", cfg.min_separation);
  optional_field(j, path, "allow_occlusion", cfg.allow_occlusion);
  optional_field(j, path, "max_attempts", cfg.max_attempts);
  if (j.contains("noise")) {
    const json& n = j.at("noise");
    const std::string np = path.empty() ? "noise" : path + ".noise";
    if (!n.is_object()) throw ParseError("manifest: " + np + " must be an object");
    reject_unknown(n, np,
                   {"depth_sigma", "semantic_flip", "occupancy_flip",
                    "center_jitter"});
    optional_field(n, np, "depth_sigma", cfg.noise.depth_sigma);
    optional_field(n, np, "semantic_flip", cfg.noise.semantic_flip);
    optional_field(n, np, "occupancy_flip", cfg.noise.occupancy_flip);
    optional_field(n, np, "center_jitter", cfg.noise.center_jitter);
  }
  try {
    cfg.validate();
  } catch (const DomainError& e) {
    throw ParseError("manifest: " + (path.empty() ? std::string("config") : path) +
                     ": " + e.what());
  }
  return cfg;
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("manifest: byte " + std::to_string(e.byte) +
                     ": malformed JSON");
  }
}

}  // namespace

std::string format_manifest(const Manifest& m) {
  json j;
  j["format"] = "buol-manifest";
  j["version"] = 1;
  j["camera"] = {{"fx", m.camera.fx}, {"fy", m.camera.fy},
                 {"cx", m.camera.cx}, {"cy", m.camera.cy},
                 {"width", m.camera.width}, {"height", m.camera.height}};
  j["planes"] = {{"count", m.planes.count},
                 {"z_near", m.planes.z_near},
                 {"z_far", m.planes.z_far}};
  j["categories"] = json::array();
  for (int k = 0; k < m.categories.size(); ++k) {
    j["categories"].push_back({{"id", k},
                               {"name", m.categories[k].name},
                               {"thing", m.categories[k].thing}});
  }
  j["centers"] = json::array();
  for (const InstanceCenter& c : m.centers) {
    j["centers"].push_back({{"u", c.u},
                            {"v", c.v},
                            {"category", c.category},
                            {"instance", c.instance_id}});
  }
  j["files"] = json::object();
  for (const auto& [role, file] : m.files) j["files"][role] = file;
  if (m.generator) j["generator"] = synth_to_json(*m.generator);
  return j.dump(2) + "\n";
}

Manifest parse_manifest(const std::string& text) {
  const json j = parse_json(text);
  if (!j.is_object()) throw ParseError("manifest: top level must be an object");
  if (field<std::string>(j, "", "format") != "buol-manifest") {
    throw ParseError("manifest: field format must be \"buol-manifest\"");
  }
  if (field<int>(j, "", "version") != 1) {
    throw ParseError("manifest: field version: unsupported");
  }
  reject_unknown(j, "",
                 {"format", "version", "camera", "planes", "categories",
                  "centers", "files", "generator"});
  Manifest m;
  const json& cam = j.contains("camera") ? j.at("camera") : json();
  m.camera.fx = field<double>(cam, "camera", "fx");
  m.camera.fy = field<double>(cam, "camera", "fy");
  m.camera.cx = field<double>(cam, "camera", "cx");
  m.camera.cy = field<double>(cam, "camera", "cy");
  m.camera.width = field<int>(cam, "camera", "width");
  m.camera.height = field<int>(cam, "camera", "height");
  try {
    m.camera.validate();
  } catch (const DomainError& e) {
    throw ParseError(std::string("manifest: camera: ") + e.what());
  }
  const json& pl = j.contains("planes") ? j.at("planes") : json();
  m.planes.count = field<int>(pl, "planes", "count");
  m.planes.z_near = field<double>(pl, "planes", "z_near");
  m.planes.z_far = field<double>(pl, "planes", "z_far");
  try {
    m.planes.validate();
  } catch (const DomainError& e) {
    throw ParseError(std::string("manifest: planes: ") + e.what());
  }

  if (!j.contains("categories") || !j.at("categories").is_array()) {
    throw ParseError("manifest: field categories must be an array");
  }
  std::vector<Category> entries;
  for (const json& c : j.at("categories")) {
    const std::string p = "categories[" + std::to_string(entries.size()) + "]";
    if (field<int>(c, p, "id") != static_cast<int>(entries.size())) {
      throw ParseError("manifest: " + p + ".id: ids must be contiguous from 0");
    }
    entries.push_back({field<std::string>(c, p, "name"), field<bool>(c, p, "thing")});
  }
  try {
    m.categories = CategoryTable(std::move(entries));
  } catch (const Error& e) {
    throw ParseError(std::string("manifest: categories: ") + e.what());
  }

  if (j.contains("centers")) {
    if (!j.at("centers").is_array()) {
      throw ParseError("manifest: field centers must be an array");
    }
    for (const json& c : j.at("centers")) {
      const std::string p = "centers[" + std::to_string(m.centers.size()) + "]";
      InstanceCenter ic;
      ic.u = field<int>(c, p, "u");
      ic.v = field<int>(c, p, "v");
      ic.category = field<int>(c, p, "category");
      ic.instance_id = field<std::uint32_t>(c, p, "instance");
      if (!m.categories.is_thing(ic.category)) {
        throw ParseError("manifest: " + p + ".category is not a thing category");
      }
      m.centers.push_back(ic);
    }
  }
  if (j.contains("files")) {
    if (!j.at("files").is_object()) {
      throw ParseError("manifest: field files must be an object");
    }
    for (const auto& [role, value] : j.at("files").items()) {
      if (!value.is_string()) {
        throw ParseError("manifest: field files." + role + " must be a string");
      }
      m.files[role] = value.get<std::string>();
    }
  }
  if (j.contains("generator")) m.generator = synth_from_json(j.at("generator"), "generator");
  return m;
}

Manifest load_manifest(const std::filesystem::path& path) {
  const auto bytes = read_bytes(path);
  Manifest m;
  try {
    m = parse_manifest(std::string(bytes.begin(), bytes.end()));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  for (const auto& [role, file] : m.files) {
    const auto full = path.parent_path() / file;
    if (!std::filesystem::exists(full)) {
      throw ParseError(path.string() + ": files." + role + ": " + full.string() +
                       " does not exist");
    }
    const Container c = read_container(full);
    if (c.camera != m.camera || c.planes != m.planes) {
      throw ParseError(path.string() + ": files." + role +
                       ": camera or planes differ from the manifest");
    }
  }
  return m;
}

void save_manifest(const std::filesystem::path& path, const Manifest& m) {
  const std::string text = format_manifest(m);
  write_bytes(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()),
                              text.size()));
}

std::string format_synth_config(const SynthConfig& cfg) {
  return json{{"generator", synth_to_json(cfg)}}.dump(2) + "\n";
}

SynthConfig parse_synth_config(const std::string& text) {
  const json j = parse_json(text);
  if (!j.is_object()) throw ParseError("config: top level must be an object");
  if (j.contains("generator")) return synth_from_json(j.at("generator"), "generator");
  return synth_from_json(j, "");
}

}  // namespace buol
