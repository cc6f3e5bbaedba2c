#pragma once

#include <cmath>
#include <vector>

#include "sketchseg/core.hpp"
#include "sketchseg/io.hpp"

namespace sketchseg {

namespace detail {

inline Stroke polyline(std::vector<Point> points) {
  Stroke s;
  s.points = std::move(points);
  return s;
}

/// Closed ring approximated by `segments` chords, starting at angle 0.
inline Stroke ring(double cx, double cy, double rx, double ry, int segments) {
  Stroke s;
  s.points.reserve(static_cast<size_t>(segments) + 1);
  for (int k = 0; k <= segments; ++k) {
    const double a = 2.0 * 3.14159265358979323846 * k / segments;
    s.points.push_back({cx + rx * std::cos(a), cy + ry * std::sin(a)});
  }
  return s;
}

}  // namespace detail

/// Built-in multi-stroke object sketches, each drawn in a local coordinate
/// space roughly 100 units across. They feed the composer when no external
/// sketch source is supplied.
inline std::vector<SingleSketch> sample_pool() {
  using detail::polyline;
  using detail::ring;
  std::vector<SingleSketch> pool;

  {
    SingleSketch house;
    house.class_label = "house";
    house.strokes.push_back(
        polyline({{10, 90}, {10, 40}, {90, 40}, {90, 90}, {10, 90}}));
    house.strokes.push_back(polyline({{5, 40}, {50, 5}, {95, 40}}));
    house.strokes.push_back(
        polyline({{42, 90}, {42, 62}, {58, 62}, {58, 90}}));
    house.strokes.push_back(
        polyline({{18, 50}, {34, 50}, {34, 64}, {18, 64}, {18, 50}}));
    house.strokes.push_back(polyline({{70, 12}, {70, 28}, {80, 28}, {80, 20}}));
    pool.push_back(std::move(house));
  }
  {
    SingleSketch tree;
    tree.class_label = "tree";
    tree.strokes.push_back(polyline({{45, 95}, {45, 60}}));
    tree.strokes.push_back(polyline({{55, 95}, {55, 60}}));
    tree.strokes.push_back(ring(50, 35, 30, 28, 14));
    tree.strokes.push_back(polyline({{30, 98}, {70, 98}}));
    pool.push_back(std::move(tree));
  }
  {
    SingleSketch car;
    car.class_label = "car";
    car.strokes.push_back(polyline(
        {{5, 70}, {15, 70}, {25, 50}, {70, 50}, {82, 70}, {95, 70}, {95, 85},
         {5, 85}, {5, 70}}));
    car.strokes.push_back(polyline({{30, 52}, {34, 62}, {48, 62}, {48, 52}}));
    car.strokes.push_back(polyline({{52, 52}, {52, 62}, {66, 62}, {62, 52}}));
    car.strokes.push_back(ring(25, 85, 9, 9, 10));
    car.strokes.push_back(ring(75, 85, 9, 9, 10));
    pool.push_back(std::move(car));
  }
  {
    SingleSketch fish;
    fish.class_label = "fish";
    fish.strokes.push_back(ring(45, 50, 35, 18, 16));
    fish.strokes.push_back(
        polyline({{80, 50}, {98, 35}, {98, 65}, {80, 50}}));
    fish.strokes.push_back(ring(25, 45, 3, 3, 8));
    fish.strokes.push_back(polyline({{40, 32}, {50, 20}, {58, 34}}));
    pool.push_back(std::move(fish));
  }
  {
    SingleSketch flower;
    flower.class_label = "flower";
    flower.strokes.push_back(polyline({{50, 98}, {50, 55}}));
    flower.strokes.push_back(
        polyline({{50, 80}, {35, 72}, {30, 82}, {50, 88}}));
    flower.strokes.push_back(
        polyline({{50, 70}, {65, 62}, {70, 72}, {50, 78}}));
    flower.strokes.push_back(ring(50, 35, 10, 10, 10));
    flower.strokes.push_back(ring(50, 35, 22, 22, 12));
    pool.push_back(std::move(flower));
  }
  {
    SingleSketch cup;
    cup.class_label = "cup";
    cup.strokes.push_back(
        polyline({{20, 30}, {24, 85}, {66, 85}, {70, 30}}));
    cup.strokes.push_back(ring(45, 30, 25, 7, 12));
    cup.strokes.push_back(
        polyline({{70, 40}, {86, 42}, {86, 62}, {68, 66}}));
    cup.strokes.push_back(polyline({{35, 22}, {32, 12}, {38, 4}}));
    cup.strokes.push_back(polyline({{52, 22}, {49, 12}, {55, 4}}));
    pool.push_back(std::move(cup));
  }

  for (SingleSketch& sketch : pool)
    for (size_t i = 0; i < sketch.strokes.size(); ++i)
      sketch.strokes[i].order = static_cast<int>(i);
  return pool;
}

}  // namespace sketchseg
