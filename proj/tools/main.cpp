#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <sketchseg/sketchseg.hpp>

namespace fs = std::filesystem;
using namespace sketchseg;

namespace {

ojson load_json_file(const std::string& path) {
  try {
    return ojson::parse(read_text(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(path + ": malformed JSON: " + e.what());
  }
}

void apply_pipeline_json(PipelineConfig& cfg, const ojson& j) {
  if (j.contains("iou_threshold")) cfg.iou_threshold = j["iou_threshold"].get<double>();
  if (j.contains("or_threshold")) cfg.or_threshold = j["or_threshold"].get<double>();
  if (j.contains("num_repeats")) cfg.num_repeats = j["num_repeats"].get<int>();
  if (j.contains("stroke_thickness"))
    cfg.stroke_thickness = j["stroke_thickness"].get<int>();
}

void apply_composer_json(ComposerConfig& cfg, const ojson& j) {
  if (j.contains("min_objects")) cfg.min_objects = j["min_objects"].get<int>();
  if (j.contains("max_objects")) cfg.max_objects = j["max_objects"].get<int>();
  if (j.contains("min_large_side"))
    cfg.min_large_side = j["min_large_side"].get<double>();
  if (j.contains("max_large_side"))
    cfg.max_large_side = j["max_large_side"].get<double>();
  if (j.contains("max_pair_iou")) cfg.max_pair_iou = j["max_pair_iou"].get<double>();
  if (j.contains("max_place_attempts"))
    cfg.max_place_attempts = j["max_place_attempts"].get<int>();
  if (j.contains("seed")) cfg.seed = j["seed"].get<uint64_t>();
  if (j.contains("canvas_options")) {
    cfg.canvas_options.clear();
    for (const ojson& pair : j["canvas_options"])
      cfg.canvas_options.emplace_back(pair.at(0).get<int>(),
                                      pair.at(1).get<int>());
  }
}

struct GlobalOptions {
  uint64_t seed = 0;
  int jobs = 1;
  std::optional<std::string> config_path;

  ojson config_json() const {
    return config_path ? load_json_file(*config_path) : ojson::object();
  }
};

void write_or_print(const std::optional<std::string>& path,
                    const std::string& text) {
  if (path)
    write_text_atomic(*path, text);
  else
    std::cout << text;
}

std::vector<std::string> scene_files_in(const std::string& dir) {
  std::vector<std::string> files;
  for (const fs::directory_entry& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const fs::path& p = entry.path();
    if (p.extension() != ".json") continue;
    const std::string name = p.filename().string();
    if (name == "annotations.json") continue;
    if (name.size() > 11 &&
        name.compare(name.size() - 11, 11, ".boxes.json") == 0)
      continue;
    files.push_back(p.string());
  }
  std::sort(files.begin(), files.end());
  return files;
}

ojson pixel_report_json(const PixelMetricReport& pixels,
                        const std::map<uint32_t, std::string>& names) {
  ojson j;
  j["ov_acc"] = pixels.ov_acc;
  j["mean_acc"] = pixels.mean_acc;
  j["m_iou"] = pixels.m_iou;
  j["fw_iou"] = pixels.fw_iou;
  ojson per_class = ojson::object();
  for (const auto& [label, stats] : pixels.per_class) {
    const auto it = names.find(label);
    const std::string key =
        it != names.end() ? it->second : std::to_string(label);
    per_class[key] = {{"iou", stats.iou},
                      {"recall", stats.recall},
                      {"gt_pixels", stats.gt_pixels}};
  }
  j["per_class"] = std::move(per_class);
  return j;
}

Image<Rgb> binary_to_rgb(const Image<uint8_t>& mask) {
  Image<Rgb> img(mask.width, mask.height, Rgb{255, 255, 255});
  for (size_t i = 0; i < mask.pixels.size(); ++i)
    if (mask.pixels[i]) img.pixels[i] = Rgb{0, 0, 0};
  return img;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stroke-level scene sketch segmentation toolkit"};
  app.require_subcommand(1);
  GlobalOptions globals;
  app.add_option("--seed", globals.seed, "base RNG seed");
  app.add_option("--jobs", globals.jobs, "worker thread count")
      ->check(CLI::PositiveNumber);
  app.add_option("--config", globals.config_path,
                 "JSON config file; explicit flags override its fields");

  // ---- compose ----------------------------------------------------------
  auto* compose = app.add_subcommand(
      "compose", "generate synthetic scenes from object sketches");
  compose->fallthrough();
  int compose_count = 1;
  std::string compose_out;
  std::optional<std::string> pool_path;
  bool compose_png = false;
  int compose_thickness = 2;
  int train_count = -1;
  ComposerConfig composer_flags;
  compose->add_option("--count", compose_count, "number of scenes")
      ->check(CLI::PositiveNumber);
  compose->add_option("--out", compose_out, "output directory")->required();
  compose->add_option("--pool", pool_path,
                      "NDJSON sketch file (default: built-in shapes)");
  compose->add_flag("--png", compose_png, "also write colored raster PNGs");
  compose->add_option("--thickness", compose_thickness,
                      "stroke thickness for PNGs");
  compose->add_option("--train-count", train_count,
                      "split output into train/ and val/");
  compose->add_option("--min-objects", composer_flags.min_objects, "");
  compose->add_option("--max-objects", composer_flags.max_objects, "");
  compose->add_option("--min-side", composer_flags.min_large_side, "");
  compose->add_option("--max-side", composer_flags.max_large_side, "");
  compose->add_option("--max-pair-iou", composer_flags.max_pair_iou, "");
  compose->add_option("--attempts", composer_flags.max_place_attempts, "");
  compose->callback([&] {
    ComposerConfig cfg;
    apply_composer_json(cfg, globals.config_json());
    if (compose->count("--min-objects")) cfg.min_objects = composer_flags.min_objects;
    if (compose->count("--max-objects")) cfg.max_objects = composer_flags.max_objects;
    if (compose->count("--min-side")) cfg.min_large_side = composer_flags.min_large_side;
    if (compose->count("--max-side")) cfg.max_large_side = composer_flags.max_large_side;
    if (compose->count("--max-pair-iou")) cfg.max_pair_iou = composer_flags.max_pair_iou;
    if (compose->count("--attempts")) cfg.max_place_attempts = composer_flags.max_place_attempts;
    if (app.count("--seed")) cfg.seed = globals.seed;

    std::vector<SingleSketch> pool;
    if (pool_path) {
      QuickdrawParseResult parsed = load_quickdraw_ndjson(*pool_path);
      if (parsed.skipped_sketches || parsed.skipped_strokes)
        std::cerr << "warning: skipped " << parsed.skipped_sketches
                  << " sketches and " << parsed.skipped_strokes
                  << " strokes in " << *pool_path << "\n";
      pool = std::move(parsed.sketches);
    } else {
      pool = sample_pool();
    }

    ComposeDatasetOptions opts;
    opts.write_png = compose_png;
    opts.png_thickness = compose_thickness;
    opts.train_count = train_count;
    opts.jobs = globals.jobs;
    const ComposeDatasetSummary summary =
        compose_dataset(pool, cfg, compose_count, compose_out, opts);
    std::cout << "wrote " << summary.scenes << " scenes to " << compose_out;
    if (summary.dropped_objects)
      std::cout << " (dropped " << summary.dropped_objects
                << " unplaceable objects)";
    std::cout << "\n";
  });

  // ---- segment ----------------------------------------------------------
  auto* seg = app.add_subcommand("segment",
                                 "group strokes against detector boxes");
  seg->fallthrough();
  std::string seg_scene;
  std::optional<std::string> seg_boxes;
  std::optional<std::string> seg_out;
  std::optional<double> cluster_gap;
  double jitter_sigma = 0.0, jitter_drop = 0.0, jitter_merge = 0.0;
  PipelineConfig seg_flags;
  seg->add_option("scene", seg_scene, "scene JSON file")->required();
  seg->add_option("--boxes", seg_boxes,
                  "detection JSON (default: oracle boxes from annotations)");
  seg->add_option("-o,--out", seg_out, "output file (default: stdout)");
  seg->add_option("--cluster-gap", cluster_gap,
                  "use the clustering baseline with this gap in px");
  seg->add_option("--jitter-sigma", jitter_sigma,
                  "perturb oracle boxes with this edge noise");
  seg->add_option("--jitter-drop", jitter_drop, "oracle box drop probability");
  seg->add_option("--jitter-merge", jitter_merge,
                  "oracle box merge probability");
  seg->add_option("--iou-threshold", seg_flags.iou_threshold, "");
  seg->add_option("--or-threshold", seg_flags.or_threshold, "");
  seg->add_option("--num-repeats", seg_flags.num_repeats, "");
  seg->add_option("--stroke-thickness", seg_flags.stroke_thickness, "");
  seg->callback([&] {
    PipelineConfig cfg;
    apply_pipeline_json(cfg, globals.config_json());
    if (seg->count("--iou-threshold")) cfg.iou_threshold = seg_flags.iou_threshold;
    if (seg->count("--or-threshold")) cfg.or_threshold = seg_flags.or_threshold;
    if (seg->count("--num-repeats")) cfg.num_repeats = seg_flags.num_repeats;
    if (seg->count("--stroke-thickness"))
      cfg.stroke_thickness = seg_flags.stroke_thickness;
    cfg.validate();

    const Scene scene = load_scene(seg_scene);
    DetectionSet detections;
    if (seg_boxes) {
      detections = load_boxes(*seg_boxes, scene.canvas_w, scene.canvas_h);
    } else if (cluster_gap) {
      detections = cluster_boxes(scene, *cluster_gap);
    } else if (seg->count("--jitter-sigma") || seg->count("--jitter-drop") ||
               seg->count("--jitter-merge")) {
      JitterConfig jitter;
      jitter.sigma = jitter_sigma;
      jitter.drop_prob = jitter_drop;
      jitter.merge_prob = jitter_merge;
      jitter.seed = globals.seed;
      detections = jittered_oracle(scene, jitter);
    } else {
      detections = oracle_boxes(scene);
    }

    const SegmentationResult result = segment(scene, detections, cfg);
    const std::string text = segmentation_to_json(result).dump(2) + "\n";
    write_or_print(seg_out, text);
  });

  // ---- evaluate ---------------------------------------------------------
  auto* eval = app.add_subcommand("evaluate",
                                  "score a segmentation against annotations");
  eval->fallthrough();
  std::vector<std::string> eval_scenes;
  std::string eval_pred;
  std::optional<std::string> eval_out;
  std::optional<std::string> eval_csv;
  int eval_thickness = 2;
  eval->add_option("scenes", eval_scenes, "scene JSON file(s)")->required();
  eval->add_option("--pred", eval_pred,
                   "segmentation JSON, or a directory of <scene>.json")
      ->required();
  eval->add_option("-o,--out", eval_out, "report file (default: stdout)");
  eval->add_option("--csv", eval_csv, "also write one CSV row per scene");
  eval->add_option("--thickness", eval_thickness,
                   "stroke thickness for pixel metrics");
  eval->callback([&] {
    PipelineConfig cfg;
    apply_pipeline_json(cfg, globals.config_json());
    int thickness = cfg.stroke_thickness;
    if (eval->count("--thickness")) thickness = eval_thickness;

    const bool pred_is_dir = fs::is_directory(eval_pred);
    if (!pred_is_dir && eval_scenes.size() > 1)
      throw std::runtime_error(
          "--pred must be a directory when scoring multiple scenes");

    std::vector<EvaluationReport> reports;
    ojson scene_rows = ojson::array();
    std::string csv =
        "scene,aon,s_iou,ov_acc,mean_acc,m_iou,fw_iou\n";
    for (const std::string& scene_path : eval_scenes) {
      const Scene scene = load_scene(scene_path);
      std::string pred_path = eval_pred;
      if (pred_is_dir)
        pred_path =
            (fs::path(eval_pred) / (fs::path(scene_path).stem().string() +
                                    ".json"))
                .string();
      const SegmentationResult pred = load_segmentation(pred_path);
      const EvaluationReport report = evaluate(scene, pred, thickness);
      reports.push_back(report);

      ojson row;
      row["scene"] = scene.id;
      row["aon"] = report.aon;
      row["s_iou"] = report.s_iou;
      row["pixel"] = pixel_report_json(report.pixels, report.class_names);
      scene_rows.push_back(std::move(row));
      csv += scene.id + ',' + std::to_string(report.aon) + ',' +
             std::to_string(report.s_iou) + ',' +
             std::to_string(report.pixels.ov_acc) + ',' +
             std::to_string(report.pixels.mean_acc) + ',' +
             std::to_string(report.pixels.m_iou) + ',' +
             std::to_string(report.pixels.fw_iou) + '\n';
    }

    const DatasetReport mean = mean_report(reports);
    ojson out;
    out["scenes"] = std::move(scene_rows);
    out["mean"] = {{"aon", mean.aon},           {"s_iou", mean.s_iou},
                   {"ov_acc", mean.ov_acc},     {"mean_acc", mean.mean_acc},
                   {"m_iou", mean.m_iou},       {"fw_iou", mean.fw_iou},
                   {"scene_count", mean.scene_count}};
    write_or_print(eval_out, out.dump(2) + "\n");
    if (eval_csv) write_text_atomic(*eval_csv, csv);
  });

  // ---- tune -------------------------------------------------------------
  auto* tune = app.add_subcommand(
      "tune", "grid-search pipeline parameters on validation sets");
  tune->fallthrough();
  std::vector<std::string> set_specs;
  std::optional<std::string> tune_out;
  std::optional<std::string> tune_csv;
  std::optional<std::string> grid_path;
  tune->add_option("--set", set_specs,
                   "validation set as name=scene_dir; boxes come from "
                   "<scene>.boxes.json beside each scene when present, "
                   "else from annotations")
      ->required();
  tune->add_option("-o,--out", tune_out, "JSON report file");
  tune->add_option("--csv", tune_csv, "CSV report file");
  tune->add_option("--grid", grid_path,
                   "grid JSON (default: the stock 1540-point sweep)");
  tune->callback([&] {
    std::vector<ValidationSet> sets;
    for (const std::string& spec : set_specs) {
      const size_t eq = spec.find('=');
      if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size())
        throw CLI::ValidationError("--set expects name=directory");
      ValidationSet set;
      set.name = spec.substr(0, eq);
      const std::string dir = spec.substr(eq + 1);
      for (const std::string& path : scene_files_in(dir)) {
        Scene scene = load_scene(path);
        const std::string boxes_path =
            (fs::path(dir) / (fs::path(path).stem().string() + ".boxes.json"))
                .string();
        DetectionSet detections;
        if (fs::exists(boxes_path))
          detections =
              load_boxes(boxes_path, scene.canvas_w, scene.canvas_h);
        else
          detections = oracle_boxes(scene);
        set.scenes.push_back(std::move(scene));
        set.detections.push_back(std::move(detections));
      }
      if (set.scenes.empty())
        throw std::runtime_error("no scene files in " + dir);
      sets.push_back(std::move(set));
    }

    GridSpec grid = default_grid();
    if (grid_path) {
      const ojson j = load_json_file(*grid_path);
      if (j.contains("iou_thresholds"))
        grid.iou_thresholds = j["iou_thresholds"].get<std::vector<double>>();
      if (j.contains("or_thresholds"))
        grid.or_thresholds = j["or_thresholds"].get<std::vector<double>>();
      if (j.contains("num_repeats_options"))
        grid.num_repeats_options =
            j["num_repeats_options"].get<std::vector<int>>();
      if (j.contains("thickness_options"))
        grid.thickness_options =
            j["thickness_options"].get<std::vector<int>>();
    }

    const TuneReport report = grid_search(sets, grid, globals.jobs);
    std::cout << "evaluated " << report.rows.size()
              << " configurations; best: iou_threshold="
              << report.best.iou_threshold
              << " or_threshold=" << report.best.or_threshold
              << " num_repeats=" << report.best.num_repeats
              << " stroke_thickness=" << report.best.stroke_thickness
              << " (average " << report.rows.front().average << ")\n";
    if (tune_out)
      write_text_atomic(*tune_out, tune_report_to_json(report).dump(2) + "\n");
    if (tune_csv) write_text_atomic(*tune_csv, tune_report_to_csv(report));
  });

  // ---- render -----------------------------------------------------------
  auto* render = app.add_subcommand(
      "render", "render a scene's grouping as a colored SVG");
  render->fallthrough();
  std::string render_scene;
  std::optional<std::string> render_pred;
  std::optional<std::string> render_out;
  double render_width = 2.0;
  render->add_option("scene", render_scene, "scene JSON file")->required();
  render->add_option("--pred", render_pred,
                     "segmentation JSON (default: annotations)");
  render->add_option("-o,--out", render_out, "SVG file (default: stdout)");
  render->add_option("--stroke-width", render_width, "SVG stroke width");
  render->callback([&] {
    const Scene scene = load_scene(render_scene);
    std::vector<StrokeGroup> groups;
    if (render_pred) {
      groups = load_segmentation(*render_pred).groups;
    } else if (scene.gt_instances) {
      groups = *scene.gt_instances;
    } else {
      throw std::runtime_error(
          "scene has no annotations; pass --pred to render a prediction");
    }
    write_or_print(render_out, render_svg(scene, groups, render_width));
  });

  // ---- rasterize --------------------------------------------------------
  auto* rasterize = app.add_subcommand(
      "rasterize", "rasterize a scene to a temporally colored PNG");
  rasterize->fallthrough();
  std::string raster_scene;
  std::string raster_out;
  int raster_thickness = 2;
  std::string raster_mode = "colored";
  rasterize->add_option("scene", raster_scene, "scene JSON file")->required();
  rasterize->add_option("-o,--out", raster_out, "PNG file")->required();
  rasterize->add_option("--thickness", raster_thickness, "stroke thickness");
  rasterize->add_option("--mode", raster_mode, "colored or binary")
      ->check(CLI::IsMember({"colored", "binary"}));
  rasterize->callback([&] {
    PipelineConfig cfg;
    apply_pipeline_json(cfg, globals.config_json());
    int thickness = cfg.stroke_thickness;
    if (rasterize->count("--thickness")) thickness = raster_thickness;
    const Scene scene = load_scene(raster_scene);
    if (raster_mode == "binary")
      write_png(binary_to_rgb(rasterize_binary(scene, thickness)), raster_out);
    else
      write_png(rasterize_colored(scene, thickness), raster_out);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
