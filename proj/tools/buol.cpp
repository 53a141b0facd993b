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

// buol command-line tool. Each stage reads a directory holding manifest.json
// and writes a new one, so partial pipelines can be rerun and diffed.
//
//   buol synth --seed 7 --out scene/
//   buol derive-priors --scene scene/ --out priors/
//   buol lift --priors priors/ --out lifted/
//   buol group --lifted lifted/ --out pred.buol --mesh pred.obj
//   buol eval --pred pred.buol --gt scene/scene.buol

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "buol/errors.hpp"
#include "buol/io.hpp"
#include "buol/lifting.hpp"
#include "buol/losses.hpp"
#include "buol/mesh.hpp"
#include "buol/metrics.hpp"
#include "buol/parallel.hpp"
#include "buol/pipeline.hpp"
#include "buol/priors.hpp"
#include "buol/reconstruction.hpp"
#include "buol/resample.hpp"
#include "buol/synth.hpp"

namespace fs = std::filesystem;
using namespace buol;

namespace {

constexpr const char* kManifest = "manifest.json";

struct Stage {
  fs::path dir;
  Manifest manifest;

  Container container(const std::string& role) const {
    const auto it = manifest.files.find(role);
    if (it == manifest.files.end()) {
      throw ParseError((dir / kManifest).string() + ": files." + role +
                       " is missing");
    }
    return read_container(dir / it->second);
  }
  bool has(const std::string& role) const {
    return manifest.files.contains(role);
  }
};

Stage load_stage(const fs::path& dir) {
  return {dir, load_manifest(dir / kManifest)};
}

// Starts an output directory whose manifest inherits camera, planes,
// categories and centers.
Manifest child_manifest(const Manifest& parent) {
  Manifest m = parent;
  m.files.clear();
  return m;
}

void put(const fs::path& dir, Manifest& m, const std::string& role,
         const Container& c) {
  const std::string name = role + ".buol";
  write_container(dir / name, c);
  m.files[role] = name;
}

void write_text(const fs::path& path, const std::string& text) {
  write_bytes(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()),
                              text.size()));
}

std::string read_text(const fs::path& path) {
  const auto bytes = read_bytes(path);
  return {bytes.begin(), bytes.end()};
}

// ---------------------------------------------------------------------------

struct SynthArgs {
  std::string config;
  std::string out;
  SynthConfig cfg;
};

int run_synth(SynthArgs& a, const CLI::App& sub) {
  SynthConfig cfg = a.cfg;
  if (!a.config.empty()) {
    cfg = parse_synth_config(read_text(a.config));
    // Flags given explicitly override the file.
    const auto given = [&](const char* name) { return sub.count(name) > 0; };
    if (given("--seed")) cfg.seed = a.cfg.seed;
    if (given("--width")) cfg.width = a.cfg.width;
    if (given("--height")) cfg.height = a.cfg.height;
    if (given("--planes")) cfg.planes = a.cfg.planes;
    if (given("--categories")) cfg.categories = a.cfg.categories;
    if (given("--things")) cfg.things = a.cfg.things;
    if (given("--stuff")) cfg.stuff = a.cfg.stuff;
    if (given("--min-separation")) cfg.min_separation = a.cfg.min_separation;
    if (given("--occlusion")) cfg.allow_occlusion = a.cfg.allow_occlusion;
  }
  const SceneGT scene = generate_scene(cfg);
  fs::create_directories(a.out);
  Manifest m;
  m.camera = scene.grid.camera();
  m.planes = scene.grid.planes();
  m.categories = scene.categories;
  m.centers = derive_centers(scene);
  m.generator = cfg;
  put(a.out, m, "scene", to_container(scene));
  save_manifest(fs::path(a.out) / kManifest, m);
  std::cout << "scene: " << m.centers.size() << " instances, "
            << scene.occupied_count() << " occupied cells -> " << a.out << "\n";
  return 0;
}

struct DeriveArgs {
  std::string scene;
  std::string out;
  double sigma = kDefaultHeatmapSigma;
  NoiseSpec noise;
  std::uint64_t noise_seed = 0;
};

int run_derive(const DeriveArgs& a) {
  const Stage in = load_stage(a.scene);
  const SceneGT scene = panoptic_from(in.container("scene"));
  validate_scene(scene);
  const Priors2D clean = derive_priors(scene, a.sigma);
  const Priors2D priors =
      perturb_priors(clean, a.noise, a.noise_seed, scene.grid.planes());
  fs::create_directories(a.out);
  Manifest m = child_manifest(in.manifest);
  m.categories = scene.categories;
  m.centers = priors.centers;
  const auto& k = scene.grid.camera();
  const auto& p = scene.grid.planes();
  put(a.out, m, "depth", to_container(priors.depth, k, p));
  put(a.out, m, "semantics", to_container(priors.semantics, k, p));
  put(a.out, m, "heatmap", to_container(priors.heatmap, k, p));
  put(a.out, m, "multiplane", to_container(priors.occupancy, k, p));
  put(a.out, m, "instances",
      instance_map_container(derive_instances2d(scene).ids, k, p));
  // Offsets always point at the true centers; the centers handed to grouping
  // carry any jitter.
  put(a.out, m, "offsets", to_container(derive_offsets3d(scene, clean.centers)));
  save_manifest(fs::path(a.out) / kManifest, m);
  std::cout << "priors: " << priors.centers.size() << " centers -> " << a.out
            << "\n";
  return 0;
}

Priors2D load_priors(const Stage& s) {
  Priors2D p;
  p.depth = depth_from(s.container("depth"));
  p.semantics = semantic_map_from(s.container("semantics"));
  p.heatmap = heatmap_from(s.container("heatmap"));
  p.occupancy = multiplane_from(s.container("multiplane"));
  p.centers = s.manifest.centers;
  return p;
}

struct LiftArgs {
  std::string priors;
  std::string out;
  std::string mode = "bottom-up";
  std::string assignment = "category";
  int channels = 16;
  std::string frame = "frustum";
  double voxel_size = 0.1;
};

int run_lift(const LiftArgs& a) {
  const Stage in = load_stage(a.priors);
  const Priors2D priors = load_priors(in);
  const CameraIntrinsics& k = in.manifest.camera;
  const DepthPlanes& p = in.manifest.planes;
  Grid grid(k, p);
  if (a.frame == "axis") {
    grid = Grid(axis_frame_enclosing_frustum(k, p, a.voxel_size), k, p);
  } else if (a.frame != "frustum") {
    throw DomainError("lift: --frame must be frustum or axis");
  }
  fs::create_directories(a.out);
  Manifest m = child_manifest(in.manifest);
  if (a.mode == "bottom-up") {
    put(a.out, m, "lifted",
        to_container(occupancy_aware_lift(priors.semantics, priors.occupancy,
                                          priors.depth, grid)));
  } else if (a.mode == "top-down") {
    ChannelAssignment assignment;
    if (a.assignment.rfind("random:", 0) == 0) {
      assignment = ChannelAssignment::random(std::stoull(a.assignment.substr(7)));
    } else if (a.assignment != "category") {
      throw DomainError("lift: --assignment must be random:SEED or category");
    }
    InstanceMask2D masks;
    masks.ids = instance_map_from(in.container("instances"));
    for (const InstanceCenter& c : in.manifest.centers) {
      masks.category_of[c.instance_id] = c.category;
    }
    for (std::uint32_t id : masks.ids.data) {
      if (id != 0 && !masks.category_of.contains(id)) {
        throw ParseError("lift: instance " + std::to_string(id) +
                         " has no center row in the manifest");
      }
    }
    const TopDownLift td = lift_instances_topdown(masks, priors.depth, grid,
                                                  assignment, a.channels);
    for (const std::string& w : td.warnings) std::cerr << "warning: " << w << "\n";
    put(a.out, m, "lifted", to_container(td.volume));
  } else {
    throw DomainError("lift: --mode must be bottom-up or top-down");
  }
  // Offsets resampled onto the lifting grid for the grouping stage.
  const OffsetField3D frustum_offsets = offsets_from(in.container("offsets"));
  OffsetField3D offsets(grid);
  offsets.offsets = from_multiplane(frustum_offsets.offsets, 2, grid);
  put(a.out, m, "offsets", to_container(offsets));
  save_manifest(fs::path(a.out) / kManifest, m);
  std::cout << "lifted (" << a.mode << ", " << a.frame << ") -> " << a.out << "\n";
  return 0;
}

struct GroupArgs {
  std::string lifted;
  std::string out;
  std::string mesh;
  double threshold = kDefaultOccupancyThreshold;
};

int run_group(const GroupArgs& a) {
  const Stage in = load_stage(a.lifted);
  const FeatureVolume lifted = feature_volume_from(in.container("lifted"));
  const OffsetField3D offsets = offsets_from(in.container("offsets"));
  if (lifted.channels != in.manifest.categories.size()) {
    throw ShapeError("group: lifted volume has " +
                     std::to_string(lifted.channels) +
                     " channels, expected one per category; group needs a "
                     "bottom-up lift");
  }
  const Refined3D refined = identity_refine(lifted, offsets);
  const MaskedReconstruction masked = mask_by_occupancy(refined, a.threshold);
  const GroupingResult grouped =
      group_instances(masked, in.manifest.centers, in.manifest.categories);
  const PanopticVolume panoptic = assemble_panoptic(masked, grouped.things);
  write_container(a.out, to_container(panoptic));
  if (!a.mesh.empty()) {
    const fs::path obj(a.mesh);
    fs::path mtl = obj;
    mtl.replace_extension(".mtl");
    const MeshText mesh = export_mesh(panoptic, mtl.filename().string());
    write_text(obj, mesh.obj);
    write_text(mtl, mesh.mtl);
    std::cout << "mesh: " << mesh.triangles << " triangles -> " << a.mesh << "\n";
  }
  std::cout << "panoptic: " << panoptic.occupied_count() << " occupied cells, "
            << grouped.dropped_cells << " dropped -> " << a.out << "\n";
  return 0;
}

struct EvalArgs {
  std::string pred;
  std::string gt;
  std::string record;
  double threshold = 0.25;
  std::string policy = "optimal";
  bool resample = false;
};

int run_eval(const EvalArgs& a) {
  PanopticVolume pred = panoptic_from(read_container(a.pred));
  const PanopticVolume gt = panoptic_from(read_container(a.gt));
  if (a.resample && pred.grid != gt.grid) pred = resample_volume(pred, gt.grid);
  MatchPolicy policy = MatchPolicy::kOptimal;
  if (a.policy == "greedy") {
    policy = MatchPolicy::kGreedy;
  } else if (a.policy != "optimal") {
    throw DomainError("eval: --matching must be optimal or greedy");
  }
  const PrqReport report = prq(pred, gt, a.threshold, policy);
  std::cout << format_prq_table(report);
  if (!a.record.empty()) write_text(a.record, format_prq_record(report));
  return 0;
}

struct LossArgs {
  std::string pred;
  std::string gt;
  std::string lifted;
  std::string scene;
  LossWeights weights;
  double truncation = kDefaultTruncation;
  std::string record;
};

int run_loss(const LossArgs& a) {
  LossReport report;
  if (!a.pred.empty() || !a.gt.empty()) {
    if (a.pred.empty() || a.gt.empty()) {
      throw DomainError("loss: --pred and --gt go together");
    }
    report = loss_2d(load_priors(load_stage(a.pred)),
                     load_priors(load_stage(a.gt)), a.weights);
  }
  if (!a.lifted.empty() || !a.scene.empty()) {
    if (a.lifted.empty() || a.scene.empty()) {
      throw DomainError("loss: --lifted and --scene go together");
    }
    const Stage lift = load_stage(a.lifted);
    const Stage sc = load_stage(a.scene);
    const SceneGT scene = panoptic_from(sc.container("scene"));
    const Refined3D refined =
        identity_refine(feature_volume_from(lift.container("lifted")),
                        offsets_from(lift.container("offsets")));
    // Predicted TSDF from the thresholded predicted occupancy.
    PanopticVolume shape(refined.grid, scene.categories);
    for (std::size_t i = 0; i < shape.semantic.size(); ++i) {
      if (refined.occupancy[i] >= kDefaultOccupancyThreshold) shape.semantic[i] = 1;
    }
    const auto tsdf = tsdf_from_scene(shape, a.truncation);
    const Targets3D targets = derive_targets3d(scene, sc.manifest.centers, a.truncation);
    for (const LossTerm& t : loss_3d(refined, tsdf, targets, a.weights).terms) {
      report.add("3d." + t.name, t.value, t.weight);
    }
  }
  if (report.terms.empty()) {
    throw DomainError("loss: give --pred/--gt and/or --lifted/--scene");
  }
  std::cout << report.format();
  if (!a.record.empty()) write_text(a.record, report.format());
  return 0;
}

struct BenchArgs {
  std::vector<int> sizes{32, 64, 128};
  int repetitions = 3;
};

double median_ms(int reps, const std::function<void()>& fn) {
  std::vector<double> t;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    t.push_back(std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - t0).count());
  }
  std::sort(t.begin(), t.end());
  return t[t.size() / 2];
}

int run_bench(const BenchArgs& a) {
  if (a.repetitions < 1) throw DomainError("bench: --repetitions must be >= 1");
  std::printf("%-22s %6s %12s\n", "op", "size", "median_ms");
  for (int n : a.sizes) {
    SynthConfig cfg;
    cfg.width = cfg.height = cfg.planes = n;
    cfg.things = n >= 32 ? 6 : 2;
    cfg.min_separation = n / 16.0;
    SceneGT scene;
    const double t_synth =
        median_ms(a.repetitions, [&] { scene = generate_scene(cfg); });
    Priors2D priors;
    const double t_priors =
        median_ms(a.repetitions, [&] { priors = derive_priors(scene); });
    FeatureVolume lifted;
    const double t_lift = median_ms(a.repetitions, [&] {
      lifted = occupancy_aware_lift(priors.semantics, priors.occupancy,
                                    priors.depth, scene.grid);
    });
    const OffsetField3D offsets = derive_offsets3d(scene, priors.centers);
    PanopticVolume pred;
    const double t_group = median_ms(a.repetitions, [&] {
      const MaskedReconstruction masked =
          mask_by_occupancy(identity_refine(lifted, offsets));
      pred = assemble_panoptic(
          masked, group_instances(masked, priors.centers, scene.categories).things);
    });
    const double t_prq = median_ms(a.repetitions, [&] { (void)prq(pred, scene); });
    const double t_tsdf =
        median_ms(a.repetitions, [&] { (void)tsdf_from_scene(scene); });
    const std::pair<const char*, double> rows[] = {
        {"generate_scene", t_synth}, {"derive_priors", t_priors},
        {"occupancy_aware_lift", t_lift}, {"mask_group_assemble", t_group},
        {"prq", t_prq}, {"tsdf_from_scene", t_tsdf}};
    for (const auto& [op, ms] : rows) std::printf("%-22s %6d %12.3f\n", op, n, ms);
  }
  return 0;
}

int run_demo(std::uint64_t seed) {
  SynthConfig cfg;
  cfg.seed = seed;
  const SceneGT scene = generate_scene(cfg);
  const PanopticVolume pred = oracle_reconstruction(scene);
  const PrqReport report = prq(pred, scene);
  std::cout << format_prq_table(report);
  std::printf("PRQ %.2f\n", 100.0 * report.all.prq);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bottom-up panoptic 3D reconstruction toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  int threads = 1;
  app.add_option("--threads", threads, "Worker threads (output does not depend on it)")
      ->check(CLI::PositiveNumber);

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "Generate a seeded synthetic scene");
  s->add_option("--config", synth.config, "JSON config (manifest generator syntax)");
  s->add_option("--out", synth.out, "Output directory")->required();
  s->add_option("--seed", synth.cfg.seed);
  s->add_option("--width", synth.cfg.width);
  s->add_option("--height", synth.cfg.height);
  s->add_option("--planes", synth.cfg.planes);
  s->add_option("--categories", synth.cfg.categories);
  s->add_option("--things", synth.cfg.things);
  s->add_option("--stuff", synth.cfg.stuff);
  s->add_option("--min-separation", synth.cfg.min_separation);
  s->add_flag("--occlusion", synth.cfg.allow_occlusion, "Allow things to occlude");

  DeriveArgs derive;
  auto* d = app.add_subcommand("derive-priors", "Derive 2D priors and 3D offsets");
  d->add_option("--scene", derive.scene, "Scene directory")->required();
  d->add_option("--out", derive.out, "Output directory")->required();
  d->add_option("--sigma", derive.sigma, "Center heatmap sigma (pixels)");
  d->add_option("--depth-sigma", derive.noise.depth_sigma, "Depth noise (m)");
  d->add_option("--semantic-flip", derive.noise.semantic_flip);
  d->add_option("--occupancy-flip", derive.noise.occupancy_flip);
  d->add_option("--center-jitter", derive.noise.center_jitter);
  d->add_option("--noise-seed", derive.noise_seed);

  LiftArgs lift;
  auto* l = app.add_subcommand("lift", "Lift 2D priors into a 3D feature volume");
  l->add_option("--priors", lift.priors, "Priors directory")->required();
  l->add_option("--out", lift.out, "Output directory")->required();
  l->add_option("--mode", lift.mode, "bottom-up | top-down")
      ->check(CLI::IsMember({"bottom-up", "top-down"}));
  l->add_option("--assignment", lift.assignment, "random:SEED | category");
  l->add_option("--channels", lift.channels, "Top-down instance channels");
  l->add_option("--frame", lift.frame, "frustum | axis")
      ->check(CLI::IsMember({"frustum", "axis"}));
  l->add_option("--voxel-size", lift.voxel_size, "Axis grid voxel size (m)");

  GroupArgs group;
  auto* g = app.add_subcommand("group", "Mask, group and assemble a panoptic volume");
  g->add_option("--lifted", group.lifted, "Lifted directory")->required();
  g->add_option("--out", group.out, "Panoptic container to write")->required();
  g->add_option("--mesh", group.mesh, "OBJ file to write (MTL alongside)");
  g->add_option("--occ-threshold", group.threshold);

  EvalArgs eval;
  auto* e = app.add_subcommand("eval", "PRQ / RSQ / RRQ of a prediction");
  e->add_option("--pred", eval.pred)->required();
  e->add_option("--gt", eval.gt)->required();
  e->add_option("--iou-threshold", eval.threshold);
  e->add_option("--matching", eval.policy, "optimal | greedy");
  e->add_option("--record", eval.record, "Write a key = value record here");
  e->add_flag("--resample", eval.resample,
              "Resample the prediction onto the ground-truth grid first");

  LossArgs loss;
  auto* lo = app.add_subcommand("loss", "Evaluate the training objectives");
  lo->add_option("--pred", loss.pred, "Predicted priors directory");
  lo->add_option("--gt", loss.gt, "Target priors directory");
  lo->add_option("--lifted", loss.lifted, "Lifted directory (3D terms)");
  lo->add_option("--scene", loss.scene, "Scene directory (3D targets)");
  lo->add_option("--w-panoptic", loss.weights.panoptic2d);
  lo->add_option("--w-depth", loss.weights.depth2d);
  lo->add_option("--w-mp-occupancy", loss.weights.mp_occupancy);
  lo->add_option("--w-semantic", loss.weights.semantic2d);
  lo->add_option("--w-center", loss.weights.center2d);
  lo->add_option("--w-occupancy-3d", loss.weights.occupancy3d);
  lo->add_option("--w-semantic-3d", loss.weights.semantic3d);
  lo->add_option("--w-offset-3d", loss.weights.offset3d);
  lo->add_option("--truncation", loss.truncation);
  lo->add_option("--record", loss.record);

  BenchArgs bench;
  auto* b = app.add_subcommand("bench", "Time the main operations");
  b->add_option("--sizes", bench.sizes)->delimiter(',');
  b->add_option("--repetitions", bench.repetitions);

  std::uint64_t demo_seed = 7;
  auto* dm = app.add_subcommand("demo", "Synthesize, reconstruct and evaluate");
  dm->add_option("--seed", demo_seed);

  CLI11_PARSE(app, argc, argv);
  try {
    set_thread_count(threads);
    if (*s) return run_synth(synth, *s);
    if (*d) return run_derive(derive);
    if (*l) return run_lift(lift);
    if (*g) return run_group(group);
    if (*e) return run_eval(eval);
    if (*lo) return run_loss(loss);
    if (*b) return run_bench(bench);
    if (*dm) return run_demo(demo_seed);
  } catch (const std::exception& ex) {
    std::cerr << "buol: error: " << ex.what() << "\n";
    return 1;
  }
  return 1;
}
