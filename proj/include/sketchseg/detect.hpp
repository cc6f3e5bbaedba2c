#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "sketchseg/core.hpp"
#include "sketchseg/io.hpp"
#include "sketchseg/rng.hpp"

namespace sketchseg {

/// Perfect detector stand-in: one box per annotated instance, the tight
/// bbox of its strokes, in instance order, score 1.0.
inline DetectionSet oracle_boxes(const Scene& scene) {
  if (!scene.gt_instances || scene.gt_instances->empty())
    throw std::invalid_argument("scene has no instance annotations");
  DetectionSet out;
  for (const StrokeGroup& inst : *scene.gt_instances) {
    std::vector<Stroke> members;
    members.reserve(inst.stroke_indices.size());
    for (int i : inst.stroke_indices)
      members.push_back(scene.strokes[static_cast<size_t>(i)]);
    out.boxes.push_back(Detection{bbox_of_strokes(members), 1.0});
  }
  return out;
}

/// Controlled degradation of the oracle detector.
struct JitterConfig {
  double sigma = 0.0;       // px std. dev. of per-edge Gaussian noise
  double drop_prob = 0.0;
  double merge_prob = 0.0;
  uint64_t seed = 0;

  void validate() const {
    if (sigma < 0.0) throw std::invalid_argument("sigma must be >= 0");
    if (drop_prob < 0.0 || drop_prob > 1.0)
      throw std::invalid_argument("drop_prob must be in [0,1]");
    if (merge_prob < 0.0 || merge_prob > 1.0)
      throw std::invalid_argument("merge_prob must be in [0,1]");
  }
};

/// Oracle boxes with each edge perturbed by Gaussian(0, sigma), the box
/// re-normalized (min <= max) and clipped to the canvas; boxes are then
/// independently dropped with drop_prob, and each surviving box merges into
/// its left neighbor with merge_prob. Deterministic per seed; all-zero
/// config reproduces oracle_boxes exactly.
inline DetectionSet jittered_oracle(const Scene& scene,
                                    const JitterConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  DetectionSet boxes = oracle_boxes(scene);

  for (Detection& d : boxes.boxes) {
    AABB& b = d.box;
    b.x_min += rng.gaussian(0.0, cfg.sigma);
    b.y_min += rng.gaussian(0.0, cfg.sigma);
    b.x_max += rng.gaussian(0.0, cfg.sigma);
    b.y_max += rng.gaussian(0.0, cfg.sigma);
    if (b.x_min > b.x_max) std::swap(b.x_min, b.x_max);
    if (b.y_min > b.y_max) std::swap(b.y_min, b.y_max);
    b.x_min = std::clamp(b.x_min, 0.0, static_cast<double>(scene.canvas_w));
    b.x_max = std::clamp(b.x_max, 0.0, static_cast<double>(scene.canvas_w));
    b.y_min = std::clamp(b.y_min, 0.0, static_cast<double>(scene.canvas_h));
    b.y_max = std::clamp(b.y_max, 0.0, static_cast<double>(scene.canvas_h));
  }

  DetectionSet kept;
  for (const Detection& d : boxes.boxes)
    if (!rng.bernoulli(cfg.drop_prob)) kept.boxes.push_back(d);

  DetectionSet out;
  for (const Detection& d : kept.boxes) {
    if (!out.boxes.empty() && rng.bernoulli(cfg.merge_prob)) {
      out.boxes.back().box.expand(d.box);
    } else {
      out.boxes.push_back(d);
    }
  }
  return out;
}

/// Non-learned baseline detector: single-linkage clustering of per-stroke
/// bboxes, strokes linked when box_distance <= gap_threshold. One box per
/// cluster (union of member bboxes), clusters ordered by their smallest
/// stroke index.
inline DetectionSet cluster_boxes(const Scene& scene, double gap_threshold) {
  const int n = static_cast<int>(scene.strokes.size());
  if (n == 0) throw std::invalid_argument("empty scene");
  std::vector<AABB> stroke_boxes;
  stroke_boxes.reserve(static_cast<size_t>(n));
  for (const Stroke& s : scene.strokes)
    stroke_boxes.push_back(bbox_of_stroke(s));

  std::vector<int> parent(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) parent[static_cast<size_t>(i)] = i;
  auto find = [&](int x) {
    while (parent[static_cast<size_t>(x)] != x) {
      parent[static_cast<size_t>(x)] =
          parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
      x = parent[static_cast<size_t>(x)];
    }
    return x;
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (box_distance(stroke_boxes[static_cast<size_t>(i)],
                       stroke_boxes[static_cast<size_t>(j)]) <= gap_threshold) {
        const int ri = find(i);
        const int rj = find(j);
        if (ri != rj) parent[static_cast<size_t>(std::max(ri, rj))] =
            std::min(ri, rj);
      }

  DetectionSet out;
  std::vector<int> cluster_slot(static_cast<size_t>(n), -1);
  for (int i = 0; i < n; ++i) {
    const int root = find(i);
    int& slot = cluster_slot[static_cast<size_t>(root)];
    if (slot < 0) {
      slot = static_cast<int>(out.boxes.size());
      out.boxes.push_back(
          Detection{stroke_boxes[static_cast<size_t>(i)], 1.0});
    } else {
      out.boxes[static_cast<size_t>(slot)].box.expand(
          stroke_boxes[static_cast<size_t>(i)]);
    }
  }
  return out;
}

}  // namespace sketchseg
