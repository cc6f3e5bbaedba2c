#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sketchseg/core.hpp"
#include "sketchseg/io.hpp"
#include "sketchseg/parallel.hpp"
#include "sketchseg/png.hpp"
#include "sketchseg/raster.hpp"
#include "sketchseg/rng.hpp"

namespace sketchseg {

struct ComposerConfig {
  int min_objects = 2;
  int max_objects = 8;
  double min_large_side = 50.0;
  double max_large_side = 700.0;
  double max_pair_iou = 0.35;
  std::vector<std::pair<int, int>> canvas_options = {{720, 1280}, {1280, 720}};
  int max_place_attempts = 100;
  uint64_t seed = 0;

  void validate() const {
    if (min_objects < 1 || max_objects < min_objects)
      throw std::invalid_argument("object count range invalid");
    if (min_large_side <= 0 || max_large_side < min_large_side)
      throw std::invalid_argument("large side range invalid");
    if (max_pair_iou < 0.0 || max_pair_iou > 1.0)
      throw std::invalid_argument("max_pair_iou must be in [0, 1]");
    if (canvas_options.empty())
      throw std::invalid_argument("at least one canvas size required");
    for (const auto& [w, h] : canvas_options)
      if (w <= 0 || h <= 0)
        throw std::invalid_argument("canvas dimensions must be positive");
    if (max_place_attempts < 1)
      throw std::invalid_argument("max_place_attempts must be positive");
  }
};

/// Uniformly rescales the sketch so its larger bbox side equals
/// `target_large_side`, translated so the bbox min corner sits at the origin.
inline SingleSketch normalize_object(const SingleSketch& sketch,
                                     double target_large_side) {
  if (sketch.strokes.empty()) throw std::invalid_argument("empty sketch");
  const AABB box = bbox_of_strokes(sketch.strokes);
  const double large = std::max(box.width(), box.height());
  if (large <= 0.0) throw std::invalid_argument("degenerate sketch");
  const double scale = target_large_side / large;

  SingleSketch out;
  out.class_label = sketch.class_label;
  out.strokes.reserve(sketch.strokes.size());
  for (const Stroke& s : sketch.strokes) {
    Stroke ns;
    ns.order = s.order;
    ns.points.reserve(s.points.size());
    for (const Point& p : s.points)
      ns.points.push_back({(p.x - box.x_min) * scale, (p.y - box.y_min) * scale});
    out.strokes.push_back(std::move(ns));
  }
  return out;
}

namespace detail {

/// Objects may be disjoint regardless of the threshold; overlapping pairs
/// must stay strictly below it.
inline bool overlap_acceptable(double pair_iou, double max_pair_iou) {
  return pair_iou == 0.0 || pair_iou < max_pair_iou;
}

}  // namespace detail

/// Places 2..8 (per config) pool sketches on a random canvas under the size
/// and pairwise-overlap constraints. Object strokes stay contiguous in the
/// global temporal order; ground-truth instances are recorded per object.
/// Objects that cannot be placed within the attempt budget are dropped and
/// counted into `dropped` when provided.
inline Scene compose_scene(const std::vector<SingleSketch>& pool,
                           const ComposerConfig& cfg, Rng& rng,
                           int* dropped = nullptr) {
  cfg.validate();
  if (pool.empty()) throw std::invalid_argument("empty sketch pool");

  Scene scene;
  const auto& canvas =
      cfg.canvas_options[static_cast<size_t>(rng.uniform_int(
          0, static_cast<int>(cfg.canvas_options.size()) - 1))];
  scene.canvas_w = canvas.first;
  scene.canvas_h = canvas.second;

  const int object_count = rng.uniform_int(cfg.min_objects, cfg.max_objects);
  std::vector<StrokeGroup> instances;
  std::vector<AABB> placed_boxes;

  for (int obj = 0; obj < object_count; ++obj) {
    const SingleSketch& source = pool[static_cast<size_t>(
        rng.uniform_int(0, static_cast<int>(pool.size()) - 1))];

    bool placed = false;
    for (int attempt = 0; attempt < cfg.max_place_attempts && !placed;
         ++attempt) {
      const double target =
          rng.uniform(cfg.min_large_side, cfg.max_large_side);
      const SingleSketch normalized = normalize_object(source, target);
      const AABB local = bbox_of_strokes(normalized.strokes);
      if (local.width() > scene.canvas_w || local.height() > scene.canvas_h)
        continue;
      const double x0 = rng.uniform(0.0, scene.canvas_w - local.width());
      const double y0 = rng.uniform(0.0, scene.canvas_h - local.height());

      std::vector<Stroke> candidate;
      candidate.reserve(normalized.strokes.size());
      for (const Stroke& s : normalized.strokes) {
        Stroke placed_stroke;
        placed_stroke.order = static_cast<int>(scene.strokes.size() +
                                               candidate.size());
        placed_stroke.points.reserve(s.points.size());
        for (const Point& p : s.points) {
          // clamp guards boundary rounding; mathematically already inside
          placed_stroke.points.push_back(
              {std::clamp(p.x + x0, 0.0, double(scene.canvas_w)),
               std::clamp(p.y + y0, 0.0, double(scene.canvas_h))});
        }
        candidate.push_back(std::move(placed_stroke));
      }
      const AABB box = bbox_of_strokes(candidate);
      const double large = std::max(box.width(), box.height());
      if (large < cfg.min_large_side || large > cfg.max_large_side) continue;

      bool overlap_ok = true;
      for (const AABB& other : placed_boxes) {
        if (!detail::overlap_acceptable(iou(box, other), cfg.max_pair_iou)) {
          overlap_ok = false;
          break;
        }
      }
      if (!overlap_ok) continue;

      std::vector<int> indices;
      indices.reserve(candidate.size());
      for (const Stroke& s : candidate) indices.push_back(s.order);
      for (Stroke& s : candidate) scene.strokes.push_back(std::move(s));
      instances.push_back(
          StrokeGroup{std::move(indices), box, source.class_label});
      placed_boxes.push_back(box);
      placed = true;
    }
    if (!placed && dropped) ++*dropped;
  }

  if (instances.empty())
    throw std::runtime_error("no objects could be placed");
  scene.gt_instances = std::move(instances);
  return scene;
}

struct ComposeDatasetOptions {
  bool write_png = false;
  int png_thickness = 2;
  int train_count = -1;  // >= 0 splits scenes into train/ and val/
  int jobs = 1;
};

struct ComposeDatasetSummary {
  int scenes = 0;
  int dropped_objects = 0;
};

namespace detail {

inline std::string scene_name(int index) {
  std::string digits = std::to_string(index);
  if (digits.size() < 5) digits.insert(0, 5 - digits.size(), '0');
  return "scene_" + digits;
}

}  // namespace detail

/// Writes `count` composed scenes (scene JSON, optional colored PNG) plus a
/// COCO annotation file per output directory. Scene i draws from a seed
/// derived from (cfg.seed, i), so outputs are a pure function of the inputs
/// and independent of `jobs`.
inline ComposeDatasetSummary compose_dataset(
    const std::vector<SingleSketch>& pool, const ComposerConfig& cfg,
    int count, const std::string& out_dir,
    const ComposeDatasetOptions& options = {}) {
  cfg.validate();
  if (count < 1) throw std::invalid_argument("count must be >= 1");
  if (options.train_count > count)
    throw std::invalid_argument("train split exceeds scene count");

  namespace fs = std::filesystem;
  const bool split = options.train_count >= 0;
  fs::create_directories(out_dir);
  if (split) {
    fs::create_directories(fs::path(out_dir) / "train");
    fs::create_directories(fs::path(out_dir) / "val");
  }

  // slim copies for annotation export; stroke data is released after save
  std::vector<Scene> records(static_cast<size_t>(count));
  std::atomic<int> dropped_total{0};

  parallel_for(count, options.jobs, [&](int i) {
    Rng rng(derive_seed(cfg.seed, static_cast<uint64_t>(i)));
    int dropped = 0;
    Scene scene = compose_scene(pool, cfg, rng, &dropped);
    dropped_total += dropped;
    scene.id = detail::scene_name(i);
    fs::path dir(out_dir);
    if (split) dir /= (i < options.train_count) ? "train" : "val";
    save_scene(scene, (dir / (scene.id + ".json")).string());
    if (options.write_png)
      write_png(rasterize_colored(scene, options.png_thickness),
                (dir / (scene.id + ".png")).string());
    Scene& slim = records[static_cast<size_t>(i)];
    slim.id = scene.id;
    slim.canvas_w = scene.canvas_w;
    slim.canvas_h = scene.canvas_h;
    slim.gt_instances = std::move(scene.gt_instances);
  });

  if (split) {
    std::vector<Scene> train(records.begin(),
                             records.begin() + options.train_count);
    std::vector<Scene> val(records.begin() + options.train_count,
                           records.end());
    export_coco_annotations(
        train, "", (fs::path(out_dir) / "train" / "annotations.json").string());
    export_coco_annotations(
        val, "", (fs::path(out_dir) / "val" / "annotations.json").string());
  } else {
    export_coco_annotations(
        records, "", (fs::path(out_dir) / "annotations.json").string());
  }
  return ComposeDatasetSummary{count, dropped_total.load()};
}

}  // namespace sketchseg
