#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sketchseg/core.hpp"

namespace sketchseg {

// Insertion-ordered JSON so emitted documents have a fixed key order.
using ojson = nlohmann::ordered_json;

/// A single-object sketch, the unit the scene composer samples from.
struct SingleSketch {
  std::string class_label;
  std::vector<Stroke> strokes;  // order equals list position
};

struct Detection {
  AABB box;
  double score = 1.0;
};

/// Candidate object boxes for one scene, as a detector would emit them.
struct DetectionSet {
  std::vector<Detection> boxes;
};

struct SegmentationResult {
  std::string scene_id;
  std::vector<StrokeGroup> groups;
  PipelineConfig config_used;
};

namespace detail {

/// Integral values are emitted as JSON integers, everything else as a double
/// (nlohmann prints the shortest round-trip decimal form).
inline ojson number(double v) {
  if (std::isfinite(v) && v == std::floor(v) && std::abs(v) <= 9.0e15)
    return static_cast<int64_t>(v);
  return v;
}

inline double require_number(const ojson& j, const std::string& context) {
  if (!j.is_number())
    throw std::runtime_error(context + ": expected a number");
  return j.get<double>();
}

}  // namespace detail

/// Writes `content` via a temp file in the target directory plus rename, so
/// a crash never leaves a half-written output behind.
inline void write_text_atomic(const std::string& path,
                              const std::string& content) {
  const std::filesystem::path target(path);
  const std::filesystem::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string());
    out.write(content.data(),
              static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, target);
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// ---------------------------------------------------------------------------
// QuickDraw simplified NDJSON
// ---------------------------------------------------------------------------

struct QuickdrawParseResult {
  std::vector<SingleSketch> sketches;
  int skipped_sketches = 0;  // lines whose drawing had no usable strokes
  int skipped_strokes = 0;   // empty stroke arrays dropped
};

/// Parses the public simplified NDJSON convention: one JSON object per line
/// with `word` and `drawing` = [[xs, ys], ...]. Coordinates are preserved
/// verbatim; temporal order is position within the drawing array. Extra
/// per-stroke arrays (e.g. timestamps) are ignored.
inline QuickdrawParseResult parse_quickdraw_ndjson(std::istream& in) {
  QuickdrawParseResult result;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const std::string where = "line " + std::to_string(line_no);

    ojson j;
    try {
      j = ojson::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw std::runtime_error(where + ": malformed JSON: " + e.what());
    }
    if (!j.is_object() || !j.contains("word") || !j.contains("drawing"))
      throw std::runtime_error(where + ": expected object with word/drawing");
    if (!j["word"].is_string() || j["word"].get<std::string>().empty())
      throw std::runtime_error(where + ": word must be a non-empty string");
    if (!j["drawing"].is_array())
      throw std::runtime_error(where + ": drawing must be an array");

    SingleSketch sketch;
    sketch.class_label = j["word"].get<std::string>();
    int stroke_no = -1;
    for (const ojson& raw : j["drawing"]) {
      ++stroke_no;
      const std::string stroke_where =
          where + ", stroke " + std::to_string(stroke_no);
      if (!raw.is_array() || raw.size() < 2)
        throw std::runtime_error(stroke_where + ": expected [xs, ys]");
      const ojson& xs = raw[0];
      const ojson& ys = raw[1];
      if (!xs.is_array() || !ys.is_array())
        throw std::runtime_error(stroke_where + ": xs/ys must be arrays");
      if (xs.size() != ys.size())
        throw std::runtime_error(
            stroke_where + ": " + std::to_string(xs.size()) + " x values vs " +
            std::to_string(ys.size()) + " y values");
      if (xs.empty()) {
        ++result.skipped_strokes;
        continue;
      }
      Stroke stroke;
      stroke.order = static_cast<int>(sketch.strokes.size());
      stroke.points.reserve(xs.size());
      for (size_t k = 0; k < xs.size(); ++k) {
        stroke.points.push_back(
            {detail::require_number(xs[k], stroke_where),
             detail::require_number(ys[k], stroke_where)});
      }
      sketch.strokes.push_back(std::move(stroke));
    }
    if (sketch.strokes.empty()) {
      ++result.skipped_sketches;
      continue;
    }
    result.sketches.push_back(std::move(sketch));
  }
  return result;
}

inline QuickdrawParseResult load_quickdraw_ndjson(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return parse_quickdraw_ndjson(in);
}

// ---------------------------------------------------------------------------
// Scene interchange format
// ---------------------------------------------------------------------------
//
// This schema is specific to this toolkit:
//   {
//     "id": "scene_00000",
//     "canvas": {"width": W, "height": H},
//     "strokes": [{"order": 0, "points": [[x, y], ...]}, ...],
//     "instances": [{"id": 0, "class": "cat", "stroke_indices": [0, 1]}, ...]
//   }
// Unknown keys are ignored on read and never written.

inline Scene scene_from_json(const ojson& j, const std::string& fallback_id) {
  if (!j.is_object()) throw std::runtime_error("scene: expected JSON object");
  Scene scene;
  scene.id = j.contains("id") && j["id"].is_string()
                 ? j["id"].get<std::string>()
                 : fallback_id;

  if (!j.contains("canvas") || !j["canvas"].is_object() ||
      !j["canvas"].contains("width") || !j["canvas"].contains("height"))
    throw std::runtime_error("scene: missing canvas {width, height}");
  scene.canvas_w = j["canvas"]["width"].get<int>();
  scene.canvas_h = j["canvas"]["height"].get<int>();
  if (scene.canvas_w <= 0 || scene.canvas_h <= 0)
    throw std::runtime_error("scene: canvas dimensions must be positive");

  if (!j.contains("strokes") || !j["strokes"].is_array())
    throw std::runtime_error("scene: missing strokes array");
  for (const ojson& sj : j["strokes"]) {
    const std::string where =
        "stroke " + std::to_string(scene.strokes.size());
    if (!sj.is_object() || !sj.contains("order") || !sj.contains("points"))
      throw std::runtime_error(where + ": expected {order, points}");
    Stroke stroke;
    stroke.order = sj["order"].get<int>();
    if (!sj["points"].is_array() || sj["points"].empty())
      throw std::runtime_error(where + ": points must be non-empty");
    for (const ojson& pj : sj["points"]) {
      if (!pj.is_array() || pj.size() != 2)
        throw std::runtime_error(where + ": each point must be [x, y]");
      const Point p{detail::require_number(pj[0], where),
                    detail::require_number(pj[1], where)};
      if (p.x < 0 || p.x > scene.canvas_w || p.y < 0 || p.y > scene.canvas_h)
        throw std::runtime_error(where + ": point outside canvas");
      stroke.points.push_back(p);
    }
    scene.strokes.push_back(std::move(stroke));
  }

  std::sort(scene.strokes.begin(), scene.strokes.end(),
            [](const Stroke& a, const Stroke& b) { return a.order < b.order; });
  for (size_t i = 0; i < scene.strokes.size(); ++i) {
    if (scene.strokes[i].order != static_cast<int>(i))
      throw std::runtime_error("scene: stroke orders must form 0.." +
                               std::to_string(scene.strokes.size() - 1));
  }

  if (j.contains("instances")) {
    if (!j["instances"].is_array())
      throw std::runtime_error("scene: instances must be an array");
    std::vector<StrokeGroup> instances;
    for (const ojson& ij : j["instances"]) {
      if (!ij.is_object() || !ij.contains("stroke_indices") ||
          !ij["stroke_indices"].is_array())
        throw std::runtime_error("instance: expected {stroke_indices}");
      std::vector<int> indices;
      for (const ojson& v : ij["stroke_indices"]) indices.push_back(v.get<int>());
      std::optional<std::string> cls;
      if (ij.contains("class") && ij["class"].is_string())
        cls = ij["class"].get<std::string>();
      instances.push_back(make_group(scene.strokes, std::move(indices), cls));
    }
    require_partition(instances, static_cast<int>(scene.strokes.size()));
    scene.gt_instances = std::move(instances);
  }
  return scene;
}

inline ojson scene_to_json(const Scene& scene) {
  ojson j;
  j["id"] = scene.id;
  j["canvas"] = {{"width", scene.canvas_w}, {"height", scene.canvas_h}};

  std::vector<const Stroke*> ordered;
  ordered.reserve(scene.strokes.size());
  for (const Stroke& s : scene.strokes) ordered.push_back(&s);
  std::sort(ordered.begin(), ordered.end(),
            [](const Stroke* a, const Stroke* b) { return a->order < b->order; });

  j["strokes"] = ojson::array();
  for (const Stroke* s : ordered) {
    ojson points = ojson::array();
    for (const Point& p : s->points)
      points.push_back({detail::number(p.x), detail::number(p.y)});
    j["strokes"].push_back({{"order", s->order}, {"points", points}});
  }

  if (scene.gt_instances) {
    j["instances"] = ojson::array();
    int id = 0;
    for (const StrokeGroup& g : *scene.gt_instances) {
      std::vector<int> indices = g.stroke_indices;
      std::sort(indices.begin(), indices.end());
      ojson ij;
      ij["id"] = id++;
      if (g.class_label) ij["class"] = *g.class_label;
      ij["stroke_indices"] = indices;
      j["instances"].push_back(ij);
    }
  }
  return j;
}

inline Scene load_scene(const std::string& path) {
  const std::string text = read_text(path);
  ojson j;
  try {
    j = ojson::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(path + ": malformed JSON: " + e.what());
  }
  return scene_from_json(j, std::filesystem::path(path).stem().string());
}

inline void save_scene(const Scene& scene, const std::string& path) {
  write_text_atomic(path, scene_to_json(scene).dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Detection boxes
// ---------------------------------------------------------------------------

/// Reads {"boxes": [{x_min, y_min, x_max, y_max, score?}, ...]}. Scores
/// default to 1.0; boxes are clipped to the given canvas.
inline DetectionSet parse_detections(const ojson& j, int canvas_w,
                                     int canvas_h) {
  if (!j.is_object() || !j.contains("boxes") || !j["boxes"].is_array())
    throw std::runtime_error("detections: expected {\"boxes\": [...]}");
  DetectionSet set;
  int index = 0;
  for (const ojson& bj : j["boxes"]) {
    const std::string where = "box " + std::to_string(index++);
    if (!bj.is_object())
      throw std::runtime_error(where + ": expected an object");
    Detection det;
    det.box.x_min = detail::require_number(bj.at("x_min"), where);
    det.box.y_min = detail::require_number(bj.at("y_min"), where);
    det.box.x_max = detail::require_number(bj.at("x_max"), where);
    det.box.y_max = detail::require_number(bj.at("y_max"), where);
    if (det.box.x_min > det.box.x_max)
      throw std::runtime_error(where + ": x_min > x_max");
    if (det.box.y_min > det.box.y_max)
      throw std::runtime_error(where + ": y_min > y_max");
    if (bj.contains("score")) {
      det.score = detail::require_number(bj["score"], where);
      if (det.score < 0.0 || det.score > 1.0)
        throw std::runtime_error(where + ": score outside [0, 1]");
    }
    det.box.x_min = std::clamp(det.box.x_min, 0.0, double(canvas_w));
    det.box.x_max = std::clamp(det.box.x_max, 0.0, double(canvas_w));
    det.box.y_min = std::clamp(det.box.y_min, 0.0, double(canvas_h));
    det.box.y_max = std::clamp(det.box.y_max, 0.0, double(canvas_h));
    set.boxes.push_back(det);
  }
  return set;
}

inline DetectionSet load_boxes(const std::string& path, int canvas_w,
                               int canvas_h) {
  ojson j;
  try {
    j = ojson::parse(read_text(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(path + ": malformed JSON: " + e.what());
  }
  return parse_detections(j, canvas_w, canvas_h);
}

inline ojson detections_to_json(const DetectionSet& set) {
  ojson j;
  j["boxes"] = ojson::array();
  for (const Detection& d : set.boxes) {
    j["boxes"].push_back({{"x_min", detail::number(d.box.x_min)},
                          {"y_min", detail::number(d.box.y_min)},
                          {"x_max", detail::number(d.box.x_max)},
                          {"y_max", detail::number(d.box.y_max)},
                          {"score", detail::number(d.score)}});
  }
  return j;
}

inline void save_boxes(const DetectionSet& set, const std::string& path) {
  write_text_atomic(path, detections_to_json(set).dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Segmentation results
// ---------------------------------------------------------------------------

inline ojson segmentation_to_json(const SegmentationResult& result) {
  ojson j;
  j["scene_id"] = result.scene_id;
  j["config"] = {{"iou_threshold", detail::number(result.config_used.iou_threshold)},
                 {"or_threshold", detail::number(result.config_used.or_threshold)},
                 {"num_repeats", result.config_used.num_repeats},
                 {"stroke_thickness", result.config_used.stroke_thickness}};
  j["groups"] = ojson::array();
  for (const StrokeGroup& g : result.groups) {
    std::vector<int> indices = g.stroke_indices;
    std::sort(indices.begin(), indices.end());
    ojson gj;
    gj["stroke_indices"] = indices;
    gj["box"] = {{"x_min", detail::number(g.box.x_min)},
                 {"y_min", detail::number(g.box.y_min)},
                 {"x_max", detail::number(g.box.x_max)},
                 {"y_max", detail::number(g.box.y_max)}};
    if (g.class_label) gj["class"] = *g.class_label;
    j["groups"].push_back(gj);
  }
  return j;
}

inline void save_segmentation(const SegmentationResult& result,
                              const std::string& path) {
  write_text_atomic(path, segmentation_to_json(result).dump(2) + "\n");
}

inline SegmentationResult load_segmentation(const std::string& path) {
  ojson j;
  try {
    j = ojson::parse(read_text(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(path + ": malformed JSON: " + e.what());
  }
  if (!j.is_object() || !j.contains("groups") || !j["groups"].is_array())
    throw std::runtime_error(path + ": expected {\"groups\": [...]}");
  SegmentationResult result;
  if (j.contains("scene_id") && j["scene_id"].is_string())
    result.scene_id = j["scene_id"].get<std::string>();
  if (j.contains("config")) {
    const ojson& cj = j["config"];
    if (cj.contains("iou_threshold"))
      result.config_used.iou_threshold = cj["iou_threshold"].get<double>();
    if (cj.contains("or_threshold"))
      result.config_used.or_threshold = cj["or_threshold"].get<double>();
    if (cj.contains("num_repeats"))
      result.config_used.num_repeats = cj["num_repeats"].get<int>();
    if (cj.contains("stroke_thickness"))
      result.config_used.stroke_thickness = cj["stroke_thickness"].get<int>();
  }
  for (const ojson& gj : j["groups"]) {
    const std::string where =
        "group " + std::to_string(result.groups.size());
    if (!gj.is_object() || !gj.contains("stroke_indices"))
      throw std::runtime_error(where + ": expected {stroke_indices}");
    StrokeGroup g;
    for (const ojson& v : gj["stroke_indices"])
      g.stroke_indices.push_back(v.get<int>());
    std::sort(g.stroke_indices.begin(), g.stroke_indices.end());
    if (gj.contains("box")) {
      const ojson& bj = gj["box"];
      g.box.x_min = detail::require_number(bj.at("x_min"), where);
      g.box.y_min = detail::require_number(bj.at("y_min"), where);
      g.box.x_max = detail::require_number(bj.at("x_max"), where);
      g.box.y_max = detail::require_number(bj.at("y_max"), where);
    }
    if (gj.contains("class") && gj["class"].is_string())
      g.class_label = gj["class"].get<std::string>();
    result.groups.push_back(std::move(g));
  }
  return result;
}

// ---------------------------------------------------------------------------
// COCO annotation export
// ---------------------------------------------------------------------------

/// Writes class-agnostic COCO annotations: every instance maps to the single
/// category "object" with bbox in [x, y, w, h] form.
inline void export_coco_annotations(const std::vector<Scene>& scenes,
                                    const std::string& image_dir,
                                    const std::string& out_file) {
  ojson j;
  j["images"] = ojson::array();
  j["annotations"] = ojson::array();
  j["categories"] = ojson::array({{{"id", 1}, {"name", "object"}}});

  int annotation_id = 1;
  int image_id = 0;
  for (const Scene& scene : scenes) {
    ++image_id;
    if (!scene.gt_instances)
      throw std::runtime_error("scene " + scene.id +
                               " has no instance annotations");
    std::filesystem::path name(scene.id + ".png");
    if (!image_dir.empty()) name = std::filesystem::path(image_dir) / name;
    j["images"].push_back({{"id", image_id},
                           {"file_name", name.generic_string()},
                           {"width", scene.canvas_w},
                           {"height", scene.canvas_h}});
    for (const StrokeGroup& g : *scene.gt_instances) {
      const double w = g.box.width();
      const double h = g.box.height();
      j["annotations"].push_back(
          {{"id", annotation_id++},
           {"image_id", image_id},
           {"category_id", 1},
           {"bbox", {detail::number(g.box.x_min), detail::number(g.box.y_min),
                     detail::number(w), detail::number(h)}},
           {"area", detail::number(w * h)},
           {"iscrowd", 0}});
    }
  }
  write_text_atomic(out_file, j.dump(2) + "\n");
}

}  // namespace sketchseg
