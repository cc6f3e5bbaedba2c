#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "sketchseg/core.hpp"
#include "sketchseg/io.hpp"
#include "sketchseg/parallel.hpp"

namespace sketchseg {

/// Inclusive range of temporal stroke indices.
struct StrokeRun {
  int begin = 0;
  int end = 0;
  int length() const { return end - begin + 1; }
};

/// Maximal runs of consecutive unassigned strokes, in temporal order.
/// `assigned[i]` is true when stroke i is already claimed.
inline std::vector<StrokeRun> maximal_runs(const std::vector<bool>& assigned) {
  std::vector<StrokeRun> runs;
  const int n = static_cast<int>(assigned.size());
  int i = 0;
  while (i < n) {
    if (assigned[static_cast<size_t>(i)]) {
      ++i;
      continue;
    }
    int j = i;
    while (j + 1 < n && !assigned[static_cast<size_t>(j + 1)]) ++j;
    runs.push_back(StrokeRun{i, j});
    i = j + 1;
  }
  return runs;
}

/// A contiguous candidate stroke sequence and its IoU against some box.
struct SequenceMatch {
  int begin = -1;
  int end = -1;
  double iou_value = 0.0;

  bool empty() const { return begin < 0; }
  int length() const { return end - begin + 1; }
};

/// Scans every contiguous subrange of every unassigned run and returns the
/// one whose tight bbox has the highest IoU with `box`. Ties prefer the
/// longer range, then the earlier start. Empty when nothing is unassigned.
inline SequenceMatch best_sequence_for_box(
    const AABB& box, const std::vector<AABB>& stroke_boxes,
    const std::vector<bool>& assigned) {
  if (stroke_boxes.size() != assigned.size())
    throw std::invalid_argument("stroke_boxes/assigned size mismatch");
  SequenceMatch best;
  for (const StrokeRun& run : maximal_runs(assigned)) {
    for (int start = run.begin; start <= run.end; ++start) {
      AABB hull = stroke_boxes[static_cast<size_t>(start)];
      for (int end = start; end <= run.end; ++end) {
        hull.expand(stroke_boxes[static_cast<size_t>(end)]);
        const double v = iou(hull, box);
        const int len = end - start + 1;
        const bool better =
            v > best.iou_value ||
            (v == best.iou_value &&
             (best.empty() || len > best.length() ||
              (len == best.length() && start < best.begin)));
        if (better) best = SequenceMatch{start, end, v};
      }
    }
  }
  return best;
}

namespace detail {

/// Canonical grouping: one sorted index list per box, ordered by smallest
/// member. Used for the convergence check between outer iterations.
inline std::vector<std::vector<int>> canonical_grouping(
    const std::vector<int>& assigned, int box_count) {
  std::vector<std::vector<int>> by_box(static_cast<size_t>(box_count));
  for (int i = 0; i < static_cast<int>(assigned.size()); ++i)
    if (assigned[static_cast<size_t>(i)] >= 0)
      by_box[static_cast<size_t>(assigned[static_cast<size_t>(i)])].push_back(
          i);
  std::vector<std::vector<int>> groups;
  for (std::vector<int>& g : by_box)
    if (!g.empty()) groups.push_back(std::move(g));
  std::sort(groups.begin(), groups.end(),
            [](const std::vector<int>& a, const std::vector<int>& b) {
              return a.front() < b.front();
            });
  return groups;
}

}  // namespace detail

/// Iterative stroke-to-box assignment. Each outer iteration: boxes are
/// deduplicated and visited in ascending area order, each claiming the
/// contiguous stroke sequence with the best IoU when it beats
/// `iou_threshold`; remaining unassigned runs (longest first) join their
/// nearest box when the overlap ratio beats `or_threshold`; runs that are
/// still orphaned become new boxes; every box is then refit to the tight
/// hull of its strokes and empty boxes are discarded. Stops early once the
/// grouping repeats, after at most `num_repeats` iterations. The returned
/// groups always partition the strokes.
///
/// `peak_bytes_out`, when given, receives an estimate of the peak working
/// state size in bytes.
inline SegmentationResult segment(const std::vector<Stroke>& strokes,
                                  const DetectionSet& detections,
                                  const PipelineConfig& cfg,
                                  std::string scene_id = "",
                                  size_t* peak_bytes_out = nullptr) {
  cfg.validate();
  SegmentationResult result;
  result.scene_id = std::move(scene_id);
  result.config_used = cfg;
  const int n = static_cast<int>(strokes.size());
  if (peak_bytes_out) *peak_bytes_out = 0;
  if (n == 0) return result;

  std::vector<AABB> stroke_boxes;
  stroke_boxes.reserve(static_cast<size_t>(n));
  for (const Stroke& s : strokes) stroke_boxes.push_back(bbox_of_stroke(s));

  std::vector<AABB> boxes;
  boxes.reserve(detections.boxes.size());
  for (const Detection& d : detections.boxes) boxes.push_back(d.box);

  std::vector<int> assigned(static_cast<size_t>(n), -1);
  std::vector<bool> mask(static_cast<size_t>(n), false);
  std::vector<std::vector<int>> previous_grouping;
  size_t peak_bytes = 0;

  auto run_hull = [&](const StrokeRun& run) {
    AABB hull = stroke_boxes[static_cast<size_t>(run.begin)];
    for (int i = run.begin + 1; i <= run.end; ++i)
      hull.expand(stroke_boxes[static_cast<size_t>(i)]);
    return hull;
  };

  for (int iteration = 0; iteration < cfg.num_repeats; ++iteration) {
    // exact duplicates would otherwise accumulate across iterations
    {
      std::vector<AABB> unique_boxes;
      unique_boxes.reserve(boxes.size());
      for (const AABB& b : boxes) {
        bool seen = false;
        for (const AABB& u : unique_boxes)
          if (u == b) {
            seen = true;
            break;
          }
        if (!seen) unique_boxes.push_back(b);
      }
      boxes = std::move(unique_boxes);
    }

    std::fill(assigned.begin(), assigned.end(), -1);
    std::fill(mask.begin(), mask.end(), false);

    std::vector<int> visit_order(boxes.size());
    std::iota(visit_order.begin(), visit_order.end(), 0);
    std::stable_sort(visit_order.begin(), visit_order.end(),
                     [&](int a, int b) {
                       return boxes[static_cast<size_t>(a)].area() <
                              boxes[static_cast<size_t>(b)].area();
                     });

    // IoU-based sequence-to-box assignment, smallest box first
    for (int bi : visit_order) {
      const SequenceMatch match =
          best_sequence_for_box(boxes[static_cast<size_t>(bi)], stroke_boxes,
                                mask);
      if (match.empty() || !(match.iou_value > cfg.iou_threshold)) continue;
      for (int i = match.begin; i <= match.end; ++i) {
        assigned[static_cast<size_t>(i)] = bi;
        mask[static_cast<size_t>(i)] = true;
      }
    }

    // remaining runs join their nearest box on sufficient overlap ratio;
    // longest runs first, distances measured against unrefit boxes
    if (!boxes.empty()) {
      std::vector<StrokeRun> runs = maximal_runs(mask);
      std::stable_sort(runs.begin(), runs.end(),
                       [](const StrokeRun& a, const StrokeRun& b) {
                         return a.length() > b.length();
                       });
      for (const StrokeRun& run : runs) {
        const AABB hull = run_hull(run);
        int nearest = -1;
        double nearest_distance = 0.0;
        for (int bi = 0; bi < static_cast<int>(boxes.size()); ++bi) {
          const AABB& candidate = boxes[static_cast<size_t>(bi)];
          const double d = box_distance(hull, candidate);
          const bool closer =
              nearest < 0 || d < nearest_distance ||
              (d == nearest_distance &&
               candidate.area() < boxes[static_cast<size_t>(nearest)].area());
          if (closer) {
            nearest = bi;
            nearest_distance = d;
          }
        }
        if (overlap_ratio(hull, boxes[static_cast<size_t>(nearest)]) >
            cfg.or_threshold) {
          for (int i = run.begin; i <= run.end; ++i) {
            assigned[static_cast<size_t>(i)] = nearest;
            mask[static_cast<size_t>(i)] = true;
          }
        }
      }
    }

    // orphaned runs become their own boxes
    for (const StrokeRun& run : maximal_runs(mask)) {
      const int bi = static_cast<int>(boxes.size());
      boxes.push_back(run_hull(run));
      for (int i = run.begin; i <= run.end; ++i) {
        assigned[static_cast<size_t>(i)] = bi;
        mask[static_cast<size_t>(i)] = true;
      }
    }

    if (peak_bytes_out) {
      const size_t bytes =
          stroke_boxes.capacity() * sizeof(AABB) +
          boxes.capacity() * sizeof(AABB) + assigned.capacity() * sizeof(int) +
          mask.capacity() / 8 + visit_order.capacity() * sizeof(int) +
          static_cast<size_t>(2 * n) * sizeof(int);  // grouping snapshots
      peak_bytes = std::max(peak_bytes, bytes);
    }

    // refit to tight hulls of the latest assignment; drop empty boxes
    {
      std::vector<int> remap(boxes.size(), -1);
      std::vector<AABB> refit;
      for (int i = 0; i < n; ++i) {
        const int bi = assigned[static_cast<size_t>(i)];
        int& slot = remap[static_cast<size_t>(bi)];
        if (slot < 0) {
          slot = static_cast<int>(refit.size());
          refit.push_back(stroke_boxes[static_cast<size_t>(i)]);
        } else {
          refit[static_cast<size_t>(slot)].expand(
              stroke_boxes[static_cast<size_t>(i)]);
        }
      }
      for (int i = 0; i < n; ++i)
        assigned[static_cast<size_t>(i)] =
            remap[static_cast<size_t>(assigned[static_cast<size_t>(i)])];
      boxes = std::move(refit);
    }

    std::vector<std::vector<int>> grouping =
        detail::canonical_grouping(assigned, static_cast<int>(boxes.size()));
    if (grouping == previous_grouping) break;
    previous_grouping = std::move(grouping);
  }

  std::vector<std::vector<int>> members(boxes.size());
  for (int i = 0; i < n; ++i)
    members[static_cast<size_t>(assigned[static_cast<size_t>(i)])].push_back(
        i);
  for (size_t bi = 0; bi < boxes.size(); ++bi) {
    if (members[bi].empty()) continue;
    result.groups.push_back(StrokeGroup{std::move(members[bi]), boxes[bi], {}});
  }
  if (peak_bytes_out) *peak_bytes_out = peak_bytes;
  return result;
}

inline SegmentationResult segment(const Scene& scene,
                                  const DetectionSet& detections,
                                  const PipelineConfig& cfg,
                                  size_t* peak_bytes_out = nullptr) {
  return segment(scene.strokes, detections, cfg, scene.id, peak_bytes_out);
}

/// Size of the stroke data itself, the baseline the working-memory estimate
/// is compared against.
inline size_t scene_vector_bytes(const std::vector<Stroke>& strokes) {
  size_t bytes = 0;
  for (const Stroke& s : strokes)
    bytes += sizeof(Stroke) + s.points.size() * sizeof(Point);
  return bytes;
}

struct SegmentBatchReport {
  std::vector<SegmentationResult> results;
  double mean_ms = 0.0;
  double median_ms = 0.0;
  size_t peak_working_bytes = 0;
  double peak_memory_ratio = 0.0;  // working bytes / scene vector bytes
};

/// Segments scenes[i] against detections[i]; results keep input order and
/// are identical for any job count.
inline SegmentBatchReport segment_batch(
    const std::vector<Scene>& scenes,
    const std::vector<DetectionSet>& detections, const PipelineConfig& cfg,
    int jobs = 1) {
  if (scenes.size() != detections.size())
    throw std::invalid_argument("one detection set required per scene");
  SegmentBatchReport report;
  report.results.resize(scenes.size());
  std::vector<double> elapsed_ms(scenes.size(), 0.0);
  std::vector<size_t> peaks(scenes.size(), 0);

  parallel_for(static_cast<int>(scenes.size()), jobs, [&](int i) {
    const auto start = std::chrono::steady_clock::now();
    size_t peak = 0;
    report.results[static_cast<size_t>(i)] =
        segment(scenes[static_cast<size_t>(i)],
                detections[static_cast<size_t>(i)], cfg, &peak);
    const auto stop = std::chrono::steady_clock::now();
    elapsed_ms[static_cast<size_t>(i)] =
        std::chrono::duration<double, std::milli>(stop - start).count();
    peaks[static_cast<size_t>(i)] = peak;
  });

  if (!scenes.empty()) {
    report.mean_ms =
        std::accumulate(elapsed_ms.begin(), elapsed_ms.end(), 0.0) /
        static_cast<double>(elapsed_ms.size());
    std::vector<double> sorted = elapsed_ms;
    std::sort(sorted.begin(), sorted.end());
    const size_t mid = sorted.size() / 2;
    report.median_ms = sorted.size() % 2 == 1
                           ? sorted[mid]
                           : 0.5 * (sorted[mid - 1] + sorted[mid]);
    for (size_t i = 0; i < scenes.size(); ++i) {
      report.peak_working_bytes =
          std::max(report.peak_working_bytes, peaks[i]);
      const size_t scene_bytes = scene_vector_bytes(scenes[i].strokes);
      if (scene_bytes > 0)
        report.peak_memory_ratio =
            std::max(report.peak_memory_ratio,
                     static_cast<double>(peaks[i]) /
                         static_cast<double>(scene_bytes));
    }
  }
  return report;
}

}  // namespace sketchseg
