#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "sketchseg/core.hpp"
#include "sketchseg/io.hpp"
#include "sketchseg/raster.hpp"

namespace sketchseg {

namespace detail {

/// Sorted stroke index lists, validated as a partition. Both metric inputs
/// must partition the same set, checked by the callers below.
inline std::vector<std::vector<int>> sorted_groups(
    const std::vector<StrokeGroup>& groups, const char* side) {
  std::vector<std::vector<int>> out;
  out.reserve(groups.size());
  std::vector<int> all;
  for (const StrokeGroup& g : groups) {
    std::vector<int> indices = g.stroke_indices;
    std::sort(indices.begin(), indices.end());
    all.insert(all.end(), indices.begin(), indices.end());
    out.push_back(std::move(indices));
  }
  std::sort(all.begin(), all.end());
  if (std::adjacent_find(all.begin(), all.end()) != all.end())
    throw std::invalid_argument(std::string(side) +
                                " groups contain a duplicate stroke index");
  return out;
}

inline std::vector<int> flatten_sorted(
    const std::vector<std::vector<int>>& groups) {
  std::vector<int> all;
  for (const std::vector<int>& g : groups)
    all.insert(all.end(), g.begin(), g.end());
  std::sort(all.begin(), all.end());
  return all;
}

inline void require_same_stroke_set(
    const std::vector<std::vector<int>>& gt,
    const std::vector<std::vector<int>>& pred) {
  if (flatten_sorted(gt) != flatten_sorted(pred))
    throw std::invalid_argument(
        "gt and pred groups do not partition the same stroke set");
}

inline size_t intersection_size(const std::vector<int>& a,
                                const std::vector<int>& b) {
  size_t count = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++count;
      ++ia;
      ++ib;
    }
  }
  return count;
}

}  // namespace detail

/// Fraction of gt groups whose stroke set is exactly some pred group's
/// stroke set. A single misplaced stroke fails the whole group.
inline double aon(const std::vector<StrokeGroup>& gt,
                  const std::vector<StrokeGroup>& pred) {
  const auto gt_sets = detail::sorted_groups(gt, "gt");
  const auto pred_sets = detail::sorted_groups(pred, "pred");
  detail::require_same_stroke_set(gt_sets, pred_sets);
  if (gt_sets.empty()) return 1.0;
  size_t matched = 0;
  for (const std::vector<int>& g : gt_sets)
    if (std::find(pred_sets.begin(), pred_sets.end(), g) != pred_sets.end())
      ++matched;
  return static_cast<double>(matched) / static_cast<double>(gt_sets.size());
}

/// Mean over gt groups of the best set IoU (over stroke indices) against
/// any pred group.
inline double s_iou(const std::vector<StrokeGroup>& gt,
                    const std::vector<StrokeGroup>& pred) {
  const auto gt_sets = detail::sorted_groups(gt, "gt");
  const auto pred_sets = detail::sorted_groups(pred, "pred");
  detail::require_same_stroke_set(gt_sets, pred_sets);
  if (gt_sets.empty()) return 1.0;
  double total = 0.0;
  for (const std::vector<int>& g : gt_sets) {
    double best = 0.0;
    for (const std::vector<int>& p : pred_sets) {
      const size_t inter = detail::intersection_size(g, p);
      if (inter == 0) continue;
      const size_t uni = g.size() + p.size() - inter;
      best = std::max(best,
                      static_cast<double>(inter) / static_cast<double>(uni));
    }
    total += best;
  }
  return total / static_cast<double>(gt_sets.size());
}

struct ClassPixelStats {
  double iou = 0.0;
  double recall = 0.0;
  size_t gt_pixels = 0;
};

struct PixelMetricReport {
  double ov_acc = 0.0;
  double mean_acc = 0.0;
  double m_iou = 0.0;
  double fw_iou = 0.0;
  std::map<uint32_t, ClassPixelStats> per_class;
};

/// The four pixel metrics over gt-foreground pixels (gt label != 0).
/// Background is not a class; classes present in gt but never predicted
/// contribute IoU 0. FWIoU weights are gt pixel frequencies and sum to 1.
inline PixelMetricReport pixel_metrics(const Image<uint32_t>& gt_labels,
                                       const Image<uint32_t>& pred_labels) {
  if (gt_labels.width != pred_labels.width ||
      gt_labels.height != pred_labels.height)
    throw std::invalid_argument("label raster dimensions differ");

  std::map<uint32_t, size_t> gt_count;       // gt pixels per class
  std::map<uint32_t, size_t> true_positive;  // gt==pred per class
  std::map<uint32_t, size_t> false_positive; // pred==c, gt!=c (gt foreground)
  size_t foreground = 0;
  size_t correct = 0;
  for (size_t i = 0; i < gt_labels.pixels.size(); ++i) {
    const uint32_t g = gt_labels.pixels[i];
    if (g == 0) continue;
    const uint32_t p = pred_labels.pixels[i];
    ++foreground;
    ++gt_count[g];
    if (p == g) {
      ++correct;
      ++true_positive[g];
    } else if (p != 0) {
      ++false_positive[p];
    }
  }
  if (foreground == 0) throw std::invalid_argument("no foreground");

  PixelMetricReport report;
  report.ov_acc =
      static_cast<double>(correct) / static_cast<double>(foreground);
  double recall_sum = 0.0;
  double iou_sum = 0.0;
  for (const auto& [label, count] : gt_count) {
    const size_t tp = true_positive.count(label) ? true_positive[label] : 0;
    const size_t fp =
        false_positive.count(label) ? false_positive[label] : 0;
    const size_t fn = count - tp;
    ClassPixelStats stats;
    stats.gt_pixels = count;
    stats.recall = static_cast<double>(tp) / static_cast<double>(count);
    stats.iou = tp == 0 ? 0.0
                        : static_cast<double>(tp) /
                              static_cast<double>(tp + fp + fn);
    recall_sum += stats.recall;
    iou_sum += stats.iou;
    report.fw_iou += (static_cast<double>(count) /
                      static_cast<double>(foreground)) *
                     stats.iou;
    report.per_class[label] = stats;
  }
  report.mean_acc = recall_sum / static_cast<double>(gt_count.size());
  report.m_iou = iou_sum / static_cast<double>(gt_count.size());
  return report;
}

/// Labels each pred group with the majority class among its strokes' gt
/// classes; ties go to the class of the group's lowest tied stroke index.
inline std::vector<StrokeGroup> oracle_classify(
    const std::vector<StrokeGroup>& pred,
    const std::vector<StrokeGroup>& gt) {
  const auto gt_sets = detail::sorted_groups(gt, "gt");
  const auto pred_sets = detail::sorted_groups(pred, "pred");
  detail::require_same_stroke_set(gt_sets, pred_sets);

  std::map<int, std::string> stroke_class;
  for (const StrokeGroup& g : gt) {
    if (!g.class_label)
      throw std::invalid_argument("gt instance missing class label");
    for (int i : g.stroke_indices) stroke_class[i] = *g.class_label;
  }

  std::vector<StrokeGroup> labeled = pred;
  for (StrokeGroup& g : labeled) {
    std::map<std::string, int> votes;
    for (int i : g.stroke_indices) ++votes[stroke_class.at(i)];
    int best_count = 0;
    for (const auto& entry : votes)
      best_count = std::max(best_count, entry.second);
    std::vector<int> sorted_indices = g.stroke_indices;
    std::sort(sorted_indices.begin(), sorted_indices.end());
    for (int i : sorted_indices) {
      const std::string& cls = stroke_class.at(i);
      if (votes[cls] == best_count) {
        g.class_label = cls;
        break;
      }
    }
  }
  return labeled;
}

struct EvaluationReport {
  double aon = 0.0;
  double s_iou = 0.0;
  PixelMetricReport pixels;
  std::map<uint32_t, std::string> class_names;  // label id -> class
};

/// Full per-scene evaluation: stroke metrics on index sets, pixel metrics
/// on label rasters at `thickness` with the prediction classified by the
/// gt-majority oracle. Class ids are assigned by first appearance in gt.
inline EvaluationReport evaluate(const Scene& scene,
                                 const SegmentationResult& result,
                                 int thickness) {
  if (!scene.gt_instances || scene.gt_instances->empty())
    throw std::invalid_argument("scene has no instance annotations");
  const std::vector<StrokeGroup>& gt = *scene.gt_instances;

  EvaluationReport report;
  report.aon = aon(gt, result.groups);
  report.s_iou = s_iou(gt, result.groups);

  const std::vector<StrokeGroup> labeled = oracle_classify(result.groups, gt);

  std::map<std::string, uint32_t> class_id;
  for (const StrokeGroup& g : gt) {
    if (!g.class_label)
      throw std::invalid_argument("gt instance missing class label");
    if (!class_id.count(*g.class_label)) {
      const uint32_t id = static_cast<uint32_t>(class_id.size() + 1);
      class_id[*g.class_label] = id;
      report.class_names[id] = *g.class_label;
    }
  }

  auto stroke_labels = [&](const std::vector<StrokeGroup>& groups) {
    std::vector<uint32_t> labels(scene.strokes.size(), 0);
    for (const StrokeGroup& g : groups)
      for (int i : g.stroke_indices)
        labels[static_cast<size_t>(i)] = class_id.at(*g.class_label);
    return labels;
  };

  const Image<uint32_t> gt_raster =
      rasterize_labels(scene, thickness, stroke_labels(gt));
  const Image<uint32_t> pred_raster =
      rasterize_labels(scene, thickness, stroke_labels(labeled));
  report.pixels = pixel_metrics(gt_raster, pred_raster);
  return report;
}

/// Unweighted per-scene means, the dataset-level convention everywhere in
/// this toolkit.
struct DatasetReport {
  double aon = 0.0;
  double s_iou = 0.0;
  double ov_acc = 0.0;
  double mean_acc = 0.0;
  double m_iou = 0.0;
  double fw_iou = 0.0;
  size_t scene_count = 0;
};

inline DatasetReport mean_report(const std::vector<EvaluationReport>& reports) {
  DatasetReport out;
  out.scene_count = reports.size();
  if (reports.empty()) return out;
  for (const EvaluationReport& r : reports) {
    out.aon += r.aon;
    out.s_iou += r.s_iou;
    out.ov_acc += r.pixels.ov_acc;
    out.mean_acc += r.pixels.mean_acc;
    out.m_iou += r.pixels.m_iou;
    out.fw_iou += r.pixels.fw_iou;
  }
  const double n = static_cast<double>(reports.size());
  out.aon /= n;
  out.s_iou /= n;
  out.ov_acc /= n;
  out.mean_acc /= n;
  out.m_iou /= n;
  out.fw_iou /= n;
  return out;
}

}  // namespace sketchseg
