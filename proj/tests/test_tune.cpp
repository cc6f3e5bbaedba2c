#include <algorithm>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "sketchseg/sketchseg.hpp"
#include "test_util.hpp"

using namespace sketchseg;
using testutil::make_stroke;

namespace {

/// Two well-separated instances drawn contiguously; the oracle detector
/// plus any sane config recovers them exactly.
Scene easy_scene(double shift, const std::string& id) {
  Scene scene;
  scene.id = id;
  scene.canvas_w = 400;
  scene.canvas_h = 200;
  scene.strokes = {
      make_stroke({{10 + shift, 10}, {60 + shift, 40}}, 0),
      make_stroke({{20 + shift, 20}, {70 + shift, 60}}, 1),
      make_stroke({{200 + shift, 100}, {260 + shift, 140}}, 2),
      make_stroke({{210 + shift, 110}, {280 + shift, 160}}, 3),
  };
  scene.gt_instances = {make_group(scene.strokes, {0, 1}, "left"),
                        make_group(scene.strokes, {2, 3}, "right")};
  return scene;
}

ValidationSet easy_set(const std::string& name, int scene_count) {
  ValidationSet set;
  set.name = name;
  for (int i = 0; i < scene_count; ++i) {
    set.scenes.push_back(
        easy_scene(static_cast<double>(i) * 7.0, name + std::to_string(i)));
    set.detections.push_back(oracle_boxes(set.scenes.back()));
  }
  return set;
}

GridSpec tiny_grid() {
  GridSpec grid;
  grid.iou_thresholds = {0.4, 0.7};
  grid.or_thresholds = {0.5, 0.6};
  grid.num_repeats_options = {1, 3};
  grid.thickness_options = {1, 2};
  return grid;
}

}  // namespace

TEST_CASE("default grid covers the documented sweep", "[tune]") {
  const GridSpec grid = default_grid();
  REQUIRE(grid.iou_thresholds.size() == 7);
  REQUIRE(grid.or_thresholds.size() == 11);
  REQUIRE(grid.num_repeats_options.size() == 5);
  REQUIRE(grid.thickness_options.size() == 4);
  REQUIRE(grid.size() == 1540);
  REQUIRE(grid.iou_thresholds.front() == 0.25);
  REQUIRE(grid.iou_thresholds.back() == 0.85);
  REQUIRE(grid.or_thresholds.front() == 0.30);
  REQUIRE(grid.or_thresholds.back() == 0.80);
  REQUIRE(grid.num_repeats_options == std::vector<int>{1, 3, 5, 7, 9});
  REQUIRE(grid.thickness_options == std::vector<int>{1, 2, 3, 4});
  REQUIRE_NOTHROW(grid.validate());
}

TEST_CASE("grid validation rejects bad axes", "[tune]") {
  GridSpec grid = tiny_grid();
  grid.or_thresholds.clear();
  REQUIRE_THROWS_WITH(grid.validate(), "grid axes must be non-empty");
  grid = tiny_grid();
  grid.iou_thresholds.push_back(1.5);
  REQUIRE_THROWS_WITH(grid.validate(), "iou_threshold must be in [0, 1]");
  grid = tiny_grid();
  grid.num_repeats_options.push_back(0);
  REQUIRE_THROWS_WITH(grid.validate(), "num_repeats must be positive");
}

TEST_CASE("a single-config grid returns that config", "[tune]") {
  GridSpec grid;
  grid.iou_thresholds = {0.65};
  grid.or_thresholds = {0.6};
  grid.num_repeats_options = {3};
  grid.thickness_options = {2};
  const TuneReport report = grid_search({easy_set("val", 2)}, grid);
  REQUIRE(report.rows.size() == 1);
  REQUIRE(report.best.iou_threshold == 0.65);
  REQUIRE(report.best.num_repeats == 3);
  REQUIRE(report.rows[0].average == 1.0);
}

TEST_CASE("ties resolve toward strict thresholds and cheap configs",
          "[tune]") {
  // every config is perfect on oracle detections, so the declared
  // tie-break order picks the tightest thresholds and cheapest run
  const TuneReport report =
      grid_search({easy_set("a", 2), easy_set("b", 3)}, tiny_grid());
  REQUIRE(report.rows.size() == 16);
  for (const TuneRow& row : report.rows) {
    REQUIRE(row.average == 1.0);
    REQUIRE(row.aon_by_set == std::vector<double>{1.0, 1.0});
    REQUIRE(row.s_iou_by_set == std::vector<double>{1.0, 1.0});
  }
  REQUIRE(report.best.iou_threshold == 0.7);
  REQUIRE(report.best.or_threshold == 0.6);
  REQUIRE(report.best.num_repeats == 1);
  REQUIRE(report.best.stroke_thickness == 1);
  REQUIRE(report.set_names == std::vector<std::string>{"a", "b"});
}

TEST_CASE("rows come out sorted by the declared total order", "[tune]") {
  // degraded detections spread the scores so the sort is non-trivial
  ValidationSet set = easy_set("noisy", 4);
  for (size_t i = 0; i < set.scenes.size(); ++i) {
    JitterConfig jitter;
    jitter.sigma = 25.0;
    jitter.seed = 100 + i;
    set.detections[i] = jittered_oracle(set.scenes[i], jitter);
  }
  const TuneReport report = grid_search({set}, tiny_grid());
  const auto in_order = [](const TuneRow& a, const TuneRow& b) {
    if (a.average != b.average) return a.average > b.average;
    if (a.config.iou_threshold != b.config.iou_threshold)
      return a.config.iou_threshold > b.config.iou_threshold;
    if (a.config.or_threshold != b.config.or_threshold)
      return a.config.or_threshold > b.config.or_threshold;
    if (a.config.num_repeats != b.config.num_repeats)
      return a.config.num_repeats < b.config.num_repeats;
    return a.config.stroke_thickness < b.config.stroke_thickness;
  };
  REQUIRE(std::is_sorted(report.rows.begin(), report.rows.end(), in_order));
  REQUIRE(report.rows.front().average >= report.rows.back().average);

  bool best_matches_front = report.best.iou_threshold ==
                                report.rows.front().config.iou_threshold &&
                            report.best.or_threshold ==
                                report.rows.front().config.or_threshold &&
                            report.best.num_repeats ==
                                report.rows.front().config.num_repeats &&
                            report.best.stroke_thickness ==
                                report.rows.front().config.stroke_thickness;
  REQUIRE(best_matches_front);
}

TEST_CASE("grid search is deterministic across job counts", "[tune]") {
  ValidationSet set = easy_set("noisy", 3);
  for (size_t i = 0; i < set.scenes.size(); ++i) {
    JitterConfig jitter;
    jitter.sigma = 15.0;
    jitter.seed = 40 + i;
    set.detections[i] = jittered_oracle(set.scenes[i], jitter);
  }
  const TuneReport serial = grid_search({set}, tiny_grid(), 1);
  const TuneReport parallel = grid_search({set}, tiny_grid(), 4);
  REQUIRE(tune_report_to_json(serial).dump() ==
          tune_report_to_json(parallel).dump());
  REQUIRE(tune_report_to_csv(serial) == tune_report_to_csv(parallel));
}

TEST_CASE("grid search validates its inputs", "[tune]") {
  REQUIRE_THROWS_WITH(grid_search({}, tiny_grid()), "no validation sets");

  ValidationSet empty_set;
  empty_set.name = "hollow";
  REQUIRE_THROWS_WITH(grid_search({empty_set}, tiny_grid()),
                      "validation set 'hollow' is empty");

  ValidationSet mismatched = easy_set("lopsided", 2);
  mismatched.detections.pop_back();
  REQUIRE_THROWS_WITH(
      grid_search({mismatched}, tiny_grid()),
      "validation set 'lopsided' needs one detection set per scene");

  ValidationSet unannotated = easy_set("bare", 1);
  unannotated.scenes[0].gt_instances.reset();
  REQUIRE_THROWS_WITH(grid_search({unannotated}, tiny_grid()),
                      "scene 'bare0' has no instance annotations");
}

TEST_CASE("tune report serializations", "[tune]") {
  const TuneReport report = grid_search({easy_set("val", 1)}, tiny_grid());

  const ojson js = tune_report_to_json(report);
  REQUIRE(js["sets"] == ojson::array({"val"}));
  REQUIRE(js["best"]["iou_threshold"] == 0.7);
  REQUIRE(js["rows"].size() == 16);
  REQUIRE(js["rows"][0]["scores"][0]["set"] == "val");
  REQUIRE(js["rows"][0]["scores"][0]["aon"] == 1.0);
  REQUIRE(js["rows"][0]["average"] == 1.0);

  const std::string csv = tune_report_to_csv(report);
  REQUIRE(csv.rfind("iou_threshold,or_threshold,num_repeats,"
                    "stroke_thickness,aon_val,s_iou_val,average\n",
                    0) == 0);
  REQUIRE(std::count(csv.begin(), csv.end(), '\n') == 17);
  REQUIRE(csv.find("0.7,0.6,1,1,1,1,1\n") != std::string::npos);
}
