#pragma once

#include <algorithm>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sketchseg/core.hpp"
#include "sketchseg/io.hpp"
#include "sketchseg/metrics.hpp"
#include "sketchseg/parallel.hpp"
#include "sketchseg/postproc.hpp"

namespace sketchseg {

struct GridSpec {
  std::vector<double> iou_thresholds;
  std::vector<double> or_thresholds;
  std::vector<int> num_repeats_options;
  std::vector<int> thickness_options;

  size_t size() const {
    return iou_thresholds.size() * or_thresholds.size() *
           num_repeats_options.size() * thickness_options.size();
  }

  void validate() const {
    if (iou_thresholds.empty() || or_thresholds.empty() ||
        num_repeats_options.empty() || thickness_options.empty())
      throw std::invalid_argument("grid axes must be non-empty");
    PipelineConfig probe;
    for (double v : iou_thresholds)
      for (double w : or_thresholds)
        for (int r : num_repeats_options)
          for (int t : thickness_options) {
            probe.iou_threshold = v;
            probe.or_threshold = w;
            probe.num_repeats = r;
            probe.stroke_thickness = t;
            probe.validate();
          }
  }
};

/// Stock sweep used by the tune CLI: IoU threshold 0.25 to 0.85 step 0.10,
/// overlap ratio 0.30 to 0.80 step 0.05, repeats {1,3,5,7,9}, thickness
/// {1,2,3,4}. 1540 configurations.
inline GridSpec default_grid() {
  GridSpec grid;
  for (int k = 25; k <= 85; k += 10)
    grid.iou_thresholds.push_back(static_cast<double>(k) / 100.0);
  for (int k = 30; k <= 80; k += 5)
    grid.or_thresholds.push_back(static_cast<double>(k) / 100.0);
  grid.num_repeats_options = {1, 3, 5, 7, 9};
  grid.thickness_options = {1, 2, 3, 4};
  return grid;
}

/// A named bundle of scenes with matching detections, the unit the tuner
/// averages over.
struct ValidationSet {
  std::string name;
  std::vector<Scene> scenes;
  std::vector<DetectionSet> detections;
};

struct TuneRow {
  PipelineConfig config;
  std::vector<double> aon_by_set;
  std::vector<double> s_iou_by_set;
  double average = 0.0;
};

struct TuneReport {
  std::vector<std::string> set_names;
  std::vector<TuneRow> rows;  // sorted descending by average
  PipelineConfig best;
};

/// Evaluates every configuration of the grid on every validation set. The
/// objective is the unweighted mean of each set's AoN and S-IoU (2k numbers
/// for k sets). Ties prefer higher iou_threshold, then higher or_threshold,
/// then fewer repeats, then thinner strokes. Deterministic for any job
/// count.
inline TuneReport grid_search(const std::vector<ValidationSet>& sets,
                              const GridSpec& grid, int jobs = 1) {
  grid.validate();
  if (sets.empty()) throw std::invalid_argument("no validation sets");
  for (const ValidationSet& set : sets) {
    if (set.scenes.empty())
      throw std::invalid_argument("validation set '" + set.name +
                                  "' is empty");
    if (set.scenes.size() != set.detections.size())
      throw std::invalid_argument("validation set '" + set.name +
                                  "' needs one detection set per scene");
    for (const Scene& scene : set.scenes)
      if (!scene.gt_instances || scene.gt_instances->empty())
        throw std::invalid_argument("scene '" + scene.id +
                                    "' has no instance annotations");
  }

  std::vector<PipelineConfig> configs;
  configs.reserve(grid.size());
  for (double iou_t : grid.iou_thresholds)
    for (double or_t : grid.or_thresholds)
      for (int repeats : grid.num_repeats_options)
        for (int thickness : grid.thickness_options) {
          PipelineConfig cfg;
          cfg.iou_threshold = iou_t;
          cfg.or_threshold = or_t;
          cfg.num_repeats = repeats;
          cfg.stroke_thickness = thickness;
          configs.push_back(cfg);
        }

  TuneReport report;
  for (const ValidationSet& set : sets) report.set_names.push_back(set.name);
  report.rows.resize(configs.size());

  parallel_for(static_cast<int>(configs.size()), jobs, [&](int ci) {
    TuneRow row;
    row.config = configs[static_cast<size_t>(ci)];
    double objective_sum = 0.0;
    for (const ValidationSet& set : sets) {
      double aon_sum = 0.0;
      double s_iou_sum = 0.0;
      for (size_t si = 0; si < set.scenes.size(); ++si) {
        const SegmentationResult result =
            segment(set.scenes[si], set.detections[si], row.config);
        aon_sum += aon(*set.scenes[si].gt_instances, result.groups);
        s_iou_sum += s_iou(*set.scenes[si].gt_instances, result.groups);
      }
      const double denom = static_cast<double>(set.scenes.size());
      row.aon_by_set.push_back(aon_sum / denom);
      row.s_iou_by_set.push_back(s_iou_sum / denom);
      objective_sum += row.aon_by_set.back() + row.s_iou_by_set.back();
    }
    row.average = objective_sum / static_cast<double>(2 * sets.size());
    report.rows[static_cast<size_t>(ci)] = std::move(row);
  });

  std::sort(report.rows.begin(), report.rows.end(),
            [](const TuneRow& a, const TuneRow& b) {
              if (a.average != b.average) return a.average > b.average;
              const PipelineConfig& ca = a.config;
              const PipelineConfig& cb = b.config;
              if (ca.iou_threshold != cb.iou_threshold)
                return ca.iou_threshold > cb.iou_threshold;
              if (ca.or_threshold != cb.or_threshold)
                return ca.or_threshold > cb.or_threshold;
              if (ca.num_repeats != cb.num_repeats)
                return ca.num_repeats < cb.num_repeats;
              return ca.stroke_thickness < cb.stroke_thickness;
            });
  report.best = report.rows.front().config;
  return report;
}

inline ojson tune_report_to_json(const TuneReport& report) {
  ojson out;
  out["sets"] = report.set_names;
  out["best"] = {{"iou_threshold", report.best.iou_threshold},
                 {"or_threshold", report.best.or_threshold},
                 {"num_repeats", report.best.num_repeats},
                 {"stroke_thickness", report.best.stroke_thickness}};
  ojson rows = ojson::array();
  for (const TuneRow& row : report.rows) {
    ojson r;
    r["iou_threshold"] = row.config.iou_threshold;
    r["or_threshold"] = row.config.or_threshold;
    r["num_repeats"] = row.config.num_repeats;
    r["stroke_thickness"] = row.config.stroke_thickness;
    ojson per_set = ojson::array();
    for (size_t i = 0; i < report.set_names.size(); ++i)
      per_set.push_back({{"set", report.set_names[i]},
                         {"aon", row.aon_by_set[i]},
                         {"s_iou", row.s_iou_by_set[i]}});
    r["scores"] = std::move(per_set);
    r["average"] = row.average;
    rows.push_back(std::move(r));
  }
  out["rows"] = std::move(rows);
  return out;
}

inline std::string tune_report_to_csv(const TuneReport& report) {
  std::ostringstream csv;
  csv << "iou_threshold,or_threshold,num_repeats,stroke_thickness";
  for (const std::string& name : report.set_names)
    csv << ",aon_" << name << ",s_iou_" << name;
  csv << ",average\n";
  csv.setf(std::ios::fmtflags(0), std::ios::floatfield);
  csv.precision(12);
  for (const TuneRow& row : report.rows) {
    csv << row.config.iou_threshold << ',' << row.config.or_threshold << ','
        << row.config.num_repeats << ',' << row.config.stroke_thickness;
    for (size_t i = 0; i < report.set_names.size(); ++i)
      csv << ',' << row.aon_by_set[i] << ',' << row.s_iou_by_set[i];
    csv << ',' << row.average << '\n';
  }
  return csv.str();
}

}  // namespace sketchseg
