#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sketchseg {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// One pen-down-to-pen-up polyline. `order` is the 0-based temporal index
/// of the stroke within its scene.
struct Stroke {
  std::vector<Point> points;
  int order = 0;
};

/// Axis-aligned bounding box. Extents may be degenerate (a point or a line);
/// area computations floor width/height at 1 px so a degenerate box keeps
/// the footprint of one inked pixel.
struct AABB {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double effective_width() const { return std::max(width(), 1.0); }
  double effective_height() const { return std::max(height(), 1.0); }
  double area() const { return effective_width() * effective_height(); }

  bool valid() const { return x_min <= x_max && y_min <= y_max; }

  void expand(const Point& p) {
    x_min = std::min(x_min, p.x);
    y_min = std::min(y_min, p.y);
    x_max = std::max(x_max, p.x);
    y_max = std::max(y_max, p.y);
  }

  void expand(const AABB& other) {
    x_min = std::min(x_min, other.x_min);
    y_min = std::min(y_min, other.y_min);
    x_max = std::max(x_max, other.x_max);
    y_max = std::max(y_max, other.y_max);
  }

  bool operator==(const AABB& other) const {
    return x_min == other.x_min && y_min == other.y_min &&
           x_max == other.x_max && y_max == other.y_max;
  }
};

/// Intersection area of the two boxes' effective (1-px-floored) extents.
/// Degenerate boxes intersect as 1-px footprints, so a box always has full
/// overlap with itself even when it is a single point.
inline double intersection_area(const AABB& a, const AABB& b) {
  const double w = std::min(a.x_min + a.effective_width(),
                            b.x_min + b.effective_width()) -
                   std::max(a.x_min, b.x_min);
  const double h = std::min(a.y_min + a.effective_height(),
                            b.y_min + b.effective_height()) -
                   std::max(a.y_min, b.y_min);
  if (w <= 0.0 || h <= 0.0) return 0.0;
  return w * h;
}

/// Intersection over union, in [0, 1]. Symmetric; 1 for identical boxes.
inline double iou(const AABB& a, const AABB& b) {
  const double inter = intersection_area(a, b);
  if (inter <= 0.0) return 0.0;
  return inter / (a.area() + b.area() - inter);
}

/// Intersection area divided by the first box's own area, in [0, 1].
/// Not symmetric: measures how much of `group_box` is covered by `det_box`.
inline double overlap_ratio(const AABB& group_box, const AABB& det_box) {
  return intersection_area(group_box, det_box) / group_box.area();
}

/// Shortest gap between the two rectangles: 0 when they intersect or touch,
/// otherwise the Euclidean length of the shortest connecting segment.
inline double box_distance(const AABB& a, const AABB& b) {
  const double dx = std::max({0.0, b.x_min - a.x_max, a.x_min - b.x_max});
  const double dy = std::max({0.0, b.y_min - a.y_max, a.y_min - b.y_max});
  if (dx == 0.0) return dy;
  if (dy == 0.0) return dx;
  return std::hypot(dx, dy);
}

inline AABB bbox_of_points(const std::vector<Point>& points) {
  if (points.empty()) throw std::invalid_argument("empty stroke set");
  AABB box{points[0].x, points[0].y, points[0].x, points[0].y};
  for (const Point& p : points) box.expand(p);
  return box;
}

inline AABB bbox_of_stroke(const Stroke& stroke) {
  return bbox_of_points(stroke.points);
}

/// Tightest box containing every point of every stroke.
inline AABB bbox_of_strokes(const std::vector<Stroke>& strokes) {
  if (strokes.empty()) throw std::invalid_argument("empty stroke set");
  AABB box = bbox_of_stroke(strokes[0]);
  for (const Stroke& s : strokes) box.expand(bbox_of_stroke(s));
  return box;
}

/// A set of strokes claimed as one object instance. `stroke_indices` is kept
/// sorted ascending; `box` is the tight hull of the member strokes.
struct StrokeGroup {
  std::vector<int> stroke_indices;
  AABB box;
  std::optional<std::string> class_label;
};

struct Scene {
  std::string id;
  int canvas_w = 0;
  int canvas_h = 0;
  std::vector<Stroke> strokes;  // sorted by order, orders form 0..N-1
  std::optional<std::vector<StrokeGroup>> gt_instances;
};

/// Tunables of the stroke-to-box assignment pipeline. `stroke_thickness`
/// only affects rasterization; the assignment itself is vector-geometric.
struct PipelineConfig {
  double iou_threshold = 0.65;
  double or_threshold = 0.60;
  int num_repeats = 3;
  int stroke_thickness = 2;

  void validate() const {
    if (!(iou_threshold >= 0.0 && iou_threshold <= 1.0))
      throw std::invalid_argument("iou_threshold must be in [0, 1]");
    if (!(or_threshold >= 0.0 && or_threshold <= 1.0))
      throw std::invalid_argument("or_threshold must be in [0, 1]");
    if (num_repeats < 1)
      throw std::invalid_argument("num_repeats must be positive");
    if (stroke_thickness < 1)
      throw std::invalid_argument("stroke_thickness must be positive");
  }
};

/// Builds a group over `indices`, deriving the tight box from the scene's
/// strokes. Indices are copied, sorted and deduplicated.
inline StrokeGroup make_group(const std::vector<Stroke>& strokes,
                              std::vector<int> indices,
                              std::optional<std::string> class_label = {}) {
  if (indices.empty()) throw std::invalid_argument("empty stroke group");
  std::sort(indices.begin(), indices.end());
  indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
  AABB box;
  bool first = true;
  for (int i : indices) {
    if (i < 0 || i >= static_cast<int>(strokes.size()))
      throw std::out_of_range("stroke index " + std::to_string(i) +
                              " out of range");
    const AABB sb = bbox_of_stroke(strokes[static_cast<size_t>(i)]);
    if (first) {
      box = sb;
      first = false;
    } else {
      box.expand(sb);
    }
  }
  return StrokeGroup{std::move(indices), box, std::move(class_label)};
}

struct PartitionCheck {
  std::vector<int> orphans;     // covered by no group
  std::vector<int> duplicates;  // covered by more than one group
  bool ok() const { return orphans.empty() && duplicates.empty(); }
};

/// Checks that the groups cover each of the `stroke_count` indices exactly
/// once. Out-of-range indices throw.
inline PartitionCheck check_partition(const std::vector<StrokeGroup>& groups,
                                      int stroke_count) {
  std::vector<int> cover(static_cast<size_t>(stroke_count), 0);
  for (const StrokeGroup& g : groups) {
    for (int i : g.stroke_indices) {
      if (i < 0 || i >= stroke_count)
        throw std::out_of_range("stroke index " + std::to_string(i) +
                                " out of range");
      ++cover[static_cast<size_t>(i)];
    }
  }
  PartitionCheck result;
  for (int i = 0; i < stroke_count; ++i) {
    if (cover[static_cast<size_t>(i)] == 0) result.orphans.push_back(i);
    if (cover[static_cast<size_t>(i)] > 1) result.duplicates.push_back(i);
  }
  return result;
}

namespace detail {
inline std::string join_indices(const std::vector<int>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(v[i]);
  }
  return out;
}
}  // namespace detail

inline void require_partition(const std::vector<StrokeGroup>& groups,
                              int stroke_count) {
  const PartitionCheck check = check_partition(groups, stroke_count);
  if (check.ok()) return;
  std::string msg = "annotation partition violation:";
  if (!check.orphans.empty())
    msg += " orphan indices [" + detail::join_indices(check.orphans) + "]";
  if (!check.duplicates.empty())
    msg +=
        " duplicate indices [" + detail::join_indices(check.duplicates) + "]";
  throw std::invalid_argument(msg);
}

}  // namespace sketchseg
