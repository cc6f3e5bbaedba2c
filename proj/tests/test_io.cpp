#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <sketchseg/io.hpp>

#include "test_util.hpp"

using namespace sketchseg;
using testutil::make_stroke;
using testutil::TempDir;

namespace {

Scene small_scene() {
  Scene scene;
  scene.id = "fixture";
  scene.canvas_w = 100;
  scene.canvas_h = 80;
  scene.strokes = {make_stroke({{1, 2}, {10, 20}}, 0),
                   make_stroke({{30, 30}, {40.5, 35.25}}, 1),
                   make_stroke({{60, 60}}, 2)};
  scene.gt_instances = {make_group(scene.strokes, {0, 1}, "cat"),
                        make_group(scene.strokes, {2}, "dog")};
  return scene;
}

}  // namespace

TEST_CASE("scene json round trip preserves everything", "[io]") {
  const Scene scene = small_scene();
  const ojson j = scene_to_json(scene);
  const Scene back = scene_from_json(j, "unused");

  REQUIRE(back.id == "fixture");
  REQUIRE(back.canvas_w == 100);
  REQUIRE(back.canvas_h == 80);
  REQUIRE(back.strokes.size() == 3);
  REQUIRE(back.strokes[1].points[1].x == 40.5);
  REQUIRE(back.strokes[1].points[1].y == 35.25);
  REQUIRE(back.strokes[2].order == 2);
  REQUIRE(back.gt_instances.has_value());
  REQUIRE(back.gt_instances->size() == 2);
  REQUIRE((*back.gt_instances)[0].stroke_indices == std::vector<int>{0, 1});
  REQUIRE((*back.gt_instances)[0].class_label == "cat");
  REQUIRE((*back.gt_instances)[1].box == AABB{60, 60, 60, 60});

  // a second serialization is byte-identical
  REQUIRE(scene_to_json(back).dump(2) == j.dump(2));
}

TEST_CASE("scene files round trip on disk", "[io]") {
  TempDir dir("io_scene");
  const Scene scene = small_scene();
  const std::string path = dir.file("fixture.json");
  save_scene(scene, path);
  const Scene back = load_scene(path);
  REQUIRE(scene_to_json(back).dump() == scene_to_json(scene).dump());
  REQUIRE(!std::filesystem::exists(path + ".tmp"));
}

TEST_CASE("scene id falls back to the file stem", "[io]") {
  TempDir dir("io_stem");
  ojson j;
  j["canvas"] = {{"width", 10}, {"height", 10}};
  j["strokes"] = ojson::array(
      {{{"order", 0}, {"points", ojson::array({{1.0, 1.0}})}}});
  write_text_atomic(dir.file("my_scene.json"), j.dump());
  REQUIRE(load_scene(dir.file("my_scene.json")).id == "my_scene");
}

TEST_CASE("scene parsing rejects malformed input", "[io]") {
  ojson good;
  good["canvas"] = {{"width", 10}, {"height", 10}};
  good["strokes"] = ojson::array(
      {{{"order", 0}, {"points", ojson::array({{1.0, 1.0}})}}});
  REQUIRE_NOTHROW(scene_from_json(good, "x"));

  ojson no_canvas = good;
  no_canvas.erase("canvas");
  REQUIRE_THROWS_WITH(scene_from_json(no_canvas, "x"),
                      Catch::Matchers::ContainsSubstring("canvas"));

  ojson outside = good;
  outside["strokes"][0]["points"][0][0] = 11.0;
  REQUIRE_THROWS_WITH(scene_from_json(outside, "x"),
                      Catch::Matchers::ContainsSubstring("outside canvas"));

  ojson bad_orders = good;
  bad_orders["strokes"].push_back(
      {{"order", 0}, {"points", ojson::array({{2.0, 2.0}})}});
  REQUIRE_THROWS_WITH(scene_from_json(bad_orders, "x"),
                      Catch::Matchers::ContainsSubstring("orders"));

  ojson gap_orders = good;
  gap_orders["strokes"][0]["order"] = 1;
  REQUIRE_THROWS_WITH(scene_from_json(gap_orders, "x"),
                      Catch::Matchers::ContainsSubstring("orders"));

  ojson bad_partition = good;
  bad_partition["strokes"].push_back(
      {{"order", 1}, {"points", ojson::array({{2.0, 2.0}})}});
  bad_partition["instances"] =
      ojson::array({{{"id", 0}, {"stroke_indices", {0}}}});
  REQUIRE_THROWS_WITH(
      scene_from_json(bad_partition, "x"),
      Catch::Matchers::ContainsSubstring("annotation partition violation"));
}

TEST_CASE("strokes are re-sorted by order on load", "[io]") {
  ojson j;
  j["canvas"] = {{"width", 10}, {"height", 10}};
  j["strokes"] = ojson::array(
      {{{"order", 1}, {"points", ojson::array({{5.0, 5.0}})}},
       {{"order", 0}, {"points", ojson::array({{1.0, 1.0}})}}});
  const Scene scene = scene_from_json(j, "x");
  REQUIRE(scene.strokes[0].order == 0);
  REQUIRE(scene.strokes[0].points[0].x == 1.0);
  REQUIRE(scene.strokes[1].order == 1);
}

TEST_CASE("ndjson parser handles the simplified drawing format", "[io]") {
  std::istringstream in(
      R"({"word": "cat", "drawing": [[[0, 10, 20], [0, 5, 5]], [[3], [4]]]})"
      "\n"
      "\n"
      R"({"word": "dog", "drawing": [[[], []], [[1, 2], [3, 4], [9, 9]]]})"
      "\n"
      R"({"word": "eel", "drawing": [[[], []]]})"
      "\n");
  const QuickdrawParseResult result = parse_quickdraw_ndjson(in);
  REQUIRE(result.sketches.size() == 2);
  REQUIRE(result.skipped_strokes == 2);
  REQUIRE(result.skipped_sketches == 1);

  const SingleSketch& cat = result.sketches[0];
  REQUIRE(cat.class_label == "cat");
  REQUIRE(cat.strokes.size() == 2);
  REQUIRE(cat.strokes[0].points.size() == 3);
  REQUIRE(cat.strokes[0].points[1].x == 10.0);
  REQUIRE(cat.strokes[0].points[1].y == 5.0);
  REQUIRE(cat.strokes[0].order == 0);
  REQUIRE(cat.strokes[1].order == 1);

  // extra per-stroke arrays (timestamps) are ignored
  const SingleSketch& dog = result.sketches[1];
  REQUIRE(dog.strokes.size() == 1);
  REQUIRE(dog.strokes[0].points.size() == 2);
  REQUIRE(dog.strokes[0].order == 0);
}

TEST_CASE("ndjson parser reports precise errors", "[io]") {
  std::istringstream ragged(
      R"({"word": "cat", "drawing": [[[1, 2], [3]]]})");
  REQUIRE_THROWS_WITH(parse_quickdraw_ndjson(ragged),
                      "line 1, stroke 0: 2 x values vs 1 y values");

  std::istringstream garbage("not json at all");
  REQUIRE_THROWS_WITH(parse_quickdraw_ndjson(garbage),
                      Catch::Matchers::StartsWith("line 1: malformed JSON"));

  std::istringstream second_line(
      R"({"word": "ok", "drawing": [[[1], [1]]]})"
      "\n"
      R"({"drawing": []})");
  REQUIRE_THROWS_WITH(parse_quickdraw_ndjson(second_line),
                      Catch::Matchers::StartsWith("line 2:"));
}

TEST_CASE("detection parsing applies defaults and validation", "[io]") {
  ojson j;
  j["boxes"] = ojson::array(
      {{{"x_min", 1.0}, {"y_min", 2.0}, {"x_max", 5.0}, {"y_max", 6.0}},
       {{"x_min", -4.0},
        {"y_min", 0.0},
        {"x_max", 150.0},
        {"y_max", 60.0},
        {"score", 0.25}}});
  const DetectionSet set = parse_detections(j, 100, 80);
  REQUIRE(set.boxes.size() == 2);
  REQUIRE(set.boxes[0].score == 1.0);
  REQUIRE(set.boxes[0].box == AABB{1, 2, 5, 6});
  REQUIRE(set.boxes[1].score == 0.25);
  REQUIRE(set.boxes[1].box == AABB{0, 0, 100, 60});  // clipped

  ojson flipped;
  flipped["boxes"] = ojson::array(
      {{{"x_min", 9.0}, {"y_min", 0.0}, {"x_max", 1.0}, {"y_max", 1.0}}});
  REQUIRE_THROWS_WITH(parse_detections(flipped, 100, 80),
                      "box 0: x_min > x_max");

  ojson bad_score;
  bad_score["boxes"] = ojson::array({{{"x_min", 0.0},
                                      {"y_min", 0.0},
                                      {"x_max", 1.0},
                                      {"y_max", 1.0},
                                      {"score", 1.5}}});
  REQUIRE_THROWS_WITH(parse_detections(bad_score, 100, 80),
                      "box 0: score outside [0, 1]");
}

TEST_CASE("detections round trip through files", "[io]") {
  TempDir dir("io_boxes");
  DetectionSet set;
  set.boxes = {Detection{AABB{1, 2, 3, 4}, 1.0},
               Detection{AABB{5.5, 6, 70, 8}, 0.5}};
  save_boxes(set, dir.file("d.json"));
  const DetectionSet back = load_boxes(dir.file("d.json"), 100, 100);
  REQUIRE(back.boxes.size() == 2);
  REQUIRE(back.boxes[0].box == set.boxes[0].box);
  REQUIRE(back.boxes[1].box == set.boxes[1].box);
  REQUIRE(back.boxes[1].score == 0.5);
}

TEST_CASE("segmentation results round trip", "[io]") {
  TempDir dir("io_seg");
  SegmentationResult result;
  result.scene_id = "s1";
  result.config_used.iou_threshold = 0.55;
  result.groups.push_back(StrokeGroup{{2, 0}, AABB{0, 0, 9, 9}, {}});
  result.groups.push_back(StrokeGroup{{1}, AABB{1, 1, 2, 2}, "cat"});

  save_segmentation(result, dir.file("out.json"));
  const SegmentationResult back = load_segmentation(dir.file("out.json"));
  REQUIRE(back.scene_id == "s1");
  REQUIRE(back.config_used.iou_threshold == 0.55);
  REQUIRE(back.groups.size() == 2);
  REQUIRE(back.groups[0].stroke_indices == std::vector<int>{0, 2});
  REQUIRE(back.groups[0].box == AABB{0, 0, 9, 9});
  REQUIRE(!back.groups[0].class_label);
  REQUIRE(back.groups[1].class_label == "cat");
}

TEST_CASE("integral numbers serialize without decimal noise", "[io]") {
  REQUIRE(detail::number(5.0).dump() == "5");
  REQUIRE(detail::number(-3.0).dump() == "-3");
  REQUIRE(detail::number(5.5).dump() == "5.5");
  const ojson j = detections_to_json(
      DetectionSet{{Detection{AABB{1, 2, 3, 4}, 1.0}}});
  REQUIRE(j.dump() ==
          R"({"boxes":[{"x_min":1,"y_min":2,"x_max":3,"y_max":4,"score":1}]})");
}

TEST_CASE("atomic writes leave no temp files and replace content", "[io]") {
  TempDir dir("io_atomic");
  const std::string path = dir.file("out.txt");
  write_text_atomic(path, "first");
  write_text_atomic(path, "second");
  REQUIRE(read_text(path) == "second");
  size_t files = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir.path()))
    (void)entry, ++files;
  REQUIRE(files == 1);
}

TEST_CASE("coco export lists images, annotations and categories", "[io]") {
  TempDir dir("io_coco");
  Scene a = small_scene();
  a.id = "a";
  Scene b;
  b.id = "b";
  b.canvas_w = 50;
  b.canvas_h = 40;
  b.gt_instances = std::vector<StrokeGroup>{};  // annotated but empty

  export_coco_annotations({a, b}, "imgs", dir.file("ann.json"));
  const ojson j = ojson::parse(read_text(dir.file("ann.json")));
  REQUIRE(j["images"].size() == 2);
  REQUIRE(j["images"][0]["id"] == 1);
  REQUIRE(j["images"][0]["file_name"] == "imgs/a.png");
  REQUIRE(j["images"][1]["width"] == 50);
  REQUIRE(j["annotations"].size() == 2);
  REQUIRE(j["annotations"][0]["id"] == 1);
  REQUIRE(j["annotations"][1]["id"] == 2);
  REQUIRE(j["annotations"][0]["image_id"] == 1);
  REQUIRE(j["annotations"][0]["category_id"] == 1);
  const ojson& bbox = j["annotations"][0]["bbox"];
  REQUIRE(bbox[0] == 1.0);
  REQUIRE(bbox[1] == 2.0);
  REQUIRE(bbox[2] == 39.5);  // instance {0,1} hull spans x 1..40.5
  REQUIRE(j["categories"].size() == 1);
  REQUIRE(j["categories"][0]["name"] == "object");

  Scene missing;
  missing.id = "m";
  missing.canvas_w = 10;
  missing.canvas_h = 10;
  REQUIRE_THROWS_WITH(
      export_coco_annotations({missing}, "", dir.file("x.json")),
      "scene m has no instance annotations");
}
