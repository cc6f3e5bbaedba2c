#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "sketchseg/core.hpp"

namespace sketchseg {

struct Rgb {
  uint8_t r = 0;
  uint8_t g = 0;
  uint8_t b = 0;
  bool operator==(const Rgb&) const = default;
};

template <typename T>
struct Image {
  int width = 0;
  int height = 0;
  std::vector<T> pixels;  // row-major

  Image() = default;
  Image(int w, int h, T fill)
      : width(w), height(h),
        pixels(static_cast<size_t>(w) * static_cast<size_t>(h), fill) {}

  T& at(int x, int y) {
    return pixels[static_cast<size_t>(y) * width + x];
  }
  const T& at(int x, int y) const {
    return pixels[static_cast<size_t>(y) * width + x];
  }

  bool operator==(const Image&) const = default;
};

/// Hue of stroke `i` out of `n`, sweeping 240 (blue) down to 0 (red).
inline double temporal_hue(int i, int n) {
  if (n < 1) throw std::invalid_argument("stroke count must be >= 1");
  if (i < 0 || i >= n)
    throw std::out_of_range("stroke order " + std::to_string(i) +
                            " outside [0, " + std::to_string(n) + ")");
  if (n == 1) return 240.0;
  return 240.0 * (1.0 - static_cast<double>(i) / (n - 1));
}

namespace detail {

/// HSV to RGB at full saturation and value; hue in [0, 360].
inline Rgb hue_to_rgb(double hue) {
  const double h = hue / 60.0;
  const int sector = std::min(static_cast<int>(std::floor(h)), 5);
  const double f = h - sector;
  double r = 0, g = 0, b = 0;
  switch (sector) {
    case 0: r = 1;     g = f;     b = 0;     break;
    case 1: r = 1 - f; g = 1;     b = 0;     break;
    case 2: r = 0;     g = 1;     b = f;     break;
    case 3: r = 0;     g = 1 - f; b = 1;     break;
    case 4: r = f;     g = 0;     b = 1;     break;
    default: r = 1;    g = 0;     b = 1 - f; break;
  }
  auto to_byte = [](double v) {
    return static_cast<uint8_t>(std::lround(255.0 * v));
  };
  return Rgb{to_byte(r), to_byte(g), to_byte(b)};
}

}  // namespace detail

/// Color of stroke `i` of `n` on the blue-to-red temporal spectrum.
/// The first stroke is pure blue, the last pure red; a lone stroke is blue.
inline Rgb temporal_color(int i, int n) {
  return detail::hue_to_rgb(temporal_hue(i, n));
}

namespace detail {

inline int round_half_up(double v) {
  return static_cast<int>(std::floor(v + 0.5));
}

/// Integer line stepping between two pixels (Bresenham).
template <typename Plot>
void trace_segment(int x0, int y0, int x1, int y1, Plot&& plot) {
  const int dx = std::abs(x1 - x0);
  const int sx = x0 < x1 ? 1 : -1;
  const int dy = -std::abs(y1 - y0);
  const int sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  while (true) {
    plot(x0, y0);
    if (x0 == x1 && y0 == y1) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

/// Rounds stroke points to pixels (half-up, clamped into the canvas), traces
/// every consecutive pair, and dilates each ink pixel by a thickness-sided
/// square. Dilation pixels falling outside the canvas are dropped.
template <typename SetPixel>
void paint_stroke(const Stroke& stroke, int thickness, int width, int height,
                  SetPixel&& set_pixel) {
  const int lo = -(thickness / 2);
  const int hi = lo + thickness - 1;
  auto plot = [&](int x, int y) {
    for (int oy = lo; oy <= hi; ++oy) {
      for (int ox = lo; ox <= hi; ++ox) {
        const int px = x + ox;
        const int py = y + oy;
        if (px >= 0 && px < width && py >= 0 && py < height)
          set_pixel(px, py);
      }
    }
  };

  std::vector<std::pair<int, int>> pts;
  pts.reserve(stroke.points.size());
  for (const Point& p : stroke.points) {
    pts.emplace_back(std::clamp(round_half_up(p.x), 0, width - 1),
                     std::clamp(round_half_up(p.y), 0, height - 1));
  }
  if (pts.size() == 1) {
    plot(pts[0].first, pts[0].second);
    return;
  }
  for (size_t i = 1; i < pts.size(); ++i)
    trace_segment(pts[i - 1].first, pts[i - 1].second, pts[i].first,
                  pts[i].second, plot);
}

inline void check_thickness(int thickness) {
  if (thickness < 1)
    throw std::invalid_argument("stroke thickness must be >= 1");
}

}  // namespace detail

/// White background, strokes painted in temporal order with the blue-to-red
/// spectrum; later strokes overwrite earlier ones at crossings.
inline Image<Rgb> rasterize_colored(const Scene& scene, int thickness) {
  detail::check_thickness(thickness);
  Image<Rgb> img(scene.canvas_w, scene.canvas_h, Rgb{255, 255, 255});
  const int n = static_cast<int>(scene.strokes.size());
  for (int i = 0; i < n; ++i) {
    const Rgb color = temporal_color(i, n);
    detail::paint_stroke(scene.strokes[static_cast<size_t>(i)], thickness,
                         img.width, img.height,
                         [&](int x, int y) { img.at(x, y) = color; });
  }
  return img;
}

/// Ink mask: 1 where any stroke paints, 0 elsewhere.
inline Image<uint8_t> rasterize_binary(const Scene& scene, int thickness) {
  detail::check_thickness(thickness);
  Image<uint8_t> img(scene.canvas_w, scene.canvas_h, 0);
  for (const Stroke& s : scene.strokes)
    detail::paint_stroke(s, thickness, img.width, img.height,
                         [&](int x, int y) { img.at(x, y) = 1; });
  return img;
}

/// Label raster: stroke `i` paints `stroke_labels[i]` (nonzero), 0 is
/// background. Strokes paint in temporal order, later labels win.
inline Image<uint32_t> rasterize_labels(
    const Scene& scene, int thickness,
    const std::vector<uint32_t>& stroke_labels) {
  detail::check_thickness(thickness);
  if (stroke_labels.size() != scene.strokes.size())
    throw std::invalid_argument("one label required per stroke");
  for (uint32_t label : stroke_labels)
    if (label == 0)
      throw std::invalid_argument("label 0 is reserved for background");
  Image<uint32_t> img(scene.canvas_w, scene.canvas_h, 0);
  for (size_t i = 0; i < scene.strokes.size(); ++i) {
    const uint32_t label = stroke_labels[i];
    detail::paint_stroke(scene.strokes[i], thickness, img.width, img.height,
                         [&](int x, int y) { img.at(x, y) = label; });
  }
  return img;
}

namespace detail {

inline std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

}  // namespace detail

/// Instance color palette for rendered output; cycles past 20 groups.
inline const std::array<const char*, 20>& instance_palette() {
  static const std::array<const char*, 20> palette = {
      "#1f77b4", "#aec7e8", "#ff7f0e", "#ffbb78", "#2ca02c",
      "#98df8a", "#d62728", "#ff9896", "#9467bd", "#c5b0d5",
      "#8c564b", "#c49c94", "#e377c2", "#f7b6d2", "#7f7f7f",
      "#c7c7c7", "#bcbd22", "#dbdb8d", "#17becf", "#9edae5"};
  return palette;
}

/// SVG 1.1 document with one path per stroke, grouped per instance and
/// colored from the fixed palette. The groups must partition the scene.
inline std::string render_svg(const Scene& scene,
                              const std::vector<StrokeGroup>& groups,
                              double stroke_width = 2.0) {
  require_partition(groups, static_cast<int>(scene.strokes.size()));

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
         std::to_string(scene.canvas_w) + "\" height=\"" +
         std::to_string(scene.canvas_h) + "\" viewBox=\"0 0 " +
         std::to_string(scene.canvas_w) + " " + std::to_string(scene.canvas_h) +
         "\">\n";
  svg += "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  for (size_t gi = 0; gi < groups.size(); ++gi) {
    const StrokeGroup& group = groups[gi];
    const char* color = instance_palette()[gi % instance_palette().size()];
    svg += "  <g id=\"instance-" + std::to_string(gi) + "\" fill=\"none\" stroke=\"" +
           color + "\" stroke-width=\"" + detail::format_double(stroke_width) +
           "\" stroke-linecap=\"round\" stroke-linejoin=\"round\">\n";
    std::vector<int> indices = group.stroke_indices;
    std::sort(indices.begin(), indices.end());
    for (int si : indices) {
      const Stroke& stroke = scene.strokes[static_cast<size_t>(si)];
      std::string d;
      for (size_t pi = 0; pi < stroke.points.size(); ++pi) {
        d += pi == 0 ? "M" : " L";
        d += detail::format_double(stroke.points[pi].x) + " " +
             detail::format_double(stroke.points[pi].y);
      }
      if (stroke.points.size() == 1)  // dot: zero-length segment
        d += " L" + detail::format_double(stroke.points[0].x) + " " +
             detail::format_double(stroke.points[0].y);
      svg += "    <path d=\"" + d + "\"/>\n";
    }
    svg += "  </g>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace sketchseg
