#include <catch2/catch_amalgamated.hpp>

#include <set>

#include <sketchseg/png.hpp>
#include <sketchseg/raster.hpp>

#include "test_util.hpp"

using namespace sketchseg;
using testutil::make_stroke;

namespace {

Scene cross_scene() {
  Scene scene;
  scene.id = "cross";
  scene.canvas_w = 11;
  scene.canvas_h = 11;
  scene.strokes = {make_stroke({{0, 5}, {10, 5}}, 0),
                   make_stroke({{5, 0}, {5, 10}}, 1)};
  return scene;
}

size_t ink_count(const Image<uint8_t>& img) {
  size_t n = 0;
  for (uint8_t v : img.pixels) n += v != 0;
  return n;
}

}  // namespace

TEST_CASE("temporal hue sweeps 240 down to 0", "[raster]") {
  REQUIRE(temporal_hue(0, 1) == 240.0);
  REQUIRE(temporal_hue(0, 5) == 240.0);
  REQUIRE(temporal_hue(4, 5) == 0.0);
  for (int n : {2, 3, 7, 36}) {
    for (int i = 1; i < n; ++i)
      REQUIRE(temporal_hue(i, n) < temporal_hue(i - 1, n));
  }
  REQUIRE_THROWS_AS(temporal_hue(0, 0), std::invalid_argument);
  REQUIRE_THROWS_AS(temporal_hue(5, 5), std::out_of_range);
  REQUIRE_THROWS_AS(temporal_hue(-1, 5), std::out_of_range);
}

TEST_CASE("temporal colors hit exact endpoints", "[raster]") {
  REQUIRE(temporal_color(0, 10) == Rgb{0, 0, 255});
  REQUIRE(temporal_color(9, 10) == Rgb{255, 0, 0});
  REQUIRE(temporal_color(0, 1) == Rgb{0, 0, 255});
  REQUIRE(temporal_color(1, 3) == Rgb{0, 255, 0});  // hue 120 is pure green
}

TEST_CASE("coordinates round half up", "[raster]") {
  REQUIRE(detail::round_half_up(0.5) == 1);
  REQUIRE(detail::round_half_up(1.5) == 2);
  REQUIRE(detail::round_half_up(2.4) == 2);
  REQUIRE(detail::round_half_up(2.6) == 3);
  REQUIRE(detail::round_half_up(-0.5) == 0);
  REQUIRE(detail::round_half_up(-0.6) == -1);
}

TEST_CASE("binary raster dilates by a thickness-sided square", "[raster]") {
  Scene scene;
  scene.canvas_w = 20;
  scene.canvas_h = 20;
  scene.strokes = {make_stroke({{2, 5}, {7, 5}}, 0)};

  REQUIRE(ink_count(rasterize_binary(scene, 1)) == 6);   // x 2..7, y 5
  REQUIRE(ink_count(rasterize_binary(scene, 2)) == 14);  // x 1..7, y 4..5
  REQUIRE(ink_count(rasterize_binary(scene, 3)) == 24);  // x 1..8, y 4..6

  const Image<uint8_t> t1 = rasterize_binary(scene, 1);
  for (int x = 2; x <= 7; ++x) REQUIRE(t1.at(x, 5) == 1);
  REQUIRE(t1.at(1, 5) == 0);
  REQUIRE(t1.at(8, 5) == 0);
}

TEST_CASE("dilation outside the canvas is dropped", "[raster]") {
  Scene scene;
  scene.canvas_w = 10;
  scene.canvas_h = 10;
  scene.strokes = {make_stroke({{0, 0}}, 0)};
  const Image<uint8_t> img = rasterize_binary(scene, 3);
  REQUIRE(ink_count(img) == 4);  // the 3x3 halo is clipped to 2x2
  REQUIRE(img.at(0, 0) == 1);
  REQUIRE(img.at(1, 1) == 1);
}

TEST_CASE("boundary coordinates clamp into the last pixel", "[raster]") {
  Scene scene;
  scene.canvas_w = 10;
  scene.canvas_h = 10;
  scene.strokes = {make_stroke({{10, 10}}, 0)};
  const Image<uint8_t> img = rasterize_binary(scene, 1);
  REQUIRE(ink_count(img) == 1);
  REQUIRE(img.at(9, 9) == 1);
}

TEST_CASE("colored raster paints temporally, later strokes win", "[raster]") {
  const Scene scene = cross_scene();
  const Image<Rgb> img = rasterize_colored(scene, 1);
  REQUIRE(img.at(0, 0) == Rgb{255, 255, 255});  // background stays white
  REQUIRE(img.at(0, 5) == Rgb{0, 0, 255});      // first stroke blue
  REQUIRE(img.at(5, 0) == Rgb{255, 0, 0});      // last stroke red
  REQUIRE(img.at(5, 5) == Rgb{255, 0, 0});      // crossing goes to the later
  REQUIRE_THROWS_AS(rasterize_colored(scene, 0), std::invalid_argument);
}

TEST_CASE("label raster respects temporal overwrite", "[raster]") {
  const Scene scene = cross_scene();
  const Image<uint32_t> img = rasterize_labels(scene, 1, {7, 9});
  REQUIRE(img.at(0, 5) == 7u);
  REQUIRE(img.at(5, 0) == 9u);
  REQUIRE(img.at(5, 5) == 9u);
  REQUIRE(img.at(0, 0) == 0u);

  REQUIRE_THROWS_WITH(rasterize_labels(scene, 1, {7}),
                      "one label required per stroke");
  REQUIRE_THROWS_WITH(rasterize_labels(scene, 1, {7, 0}),
                      "label 0 is reserved for background");
}

TEST_CASE("rasterization is bit-reproducible", "[raster]") {
  const Scene scene = cross_scene();
  REQUIRE(rasterize_colored(scene, 2) == rasterize_colored(scene, 2));
  REQUIRE(png_encode(rasterize_colored(scene, 2)) ==
          png_encode(rasterize_colored(scene, 2)));
}

TEST_CASE("png encoding emits a valid container", "[raster]") {
  const Image<Rgb> img(3, 2, Rgb{10, 20, 30});
  const std::string png = png_encode(img);
  const unsigned char sig[8] = {137, 80, 78, 71, 13, 10, 26, 10};
  REQUIRE(png.size() > 8 + 25 + 12);
  for (int i = 0; i < 8; ++i)
    REQUIRE(static_cast<unsigned char>(png[static_cast<size_t>(i)]) == sig[i]);
  REQUIRE(png.substr(12, 4) == "IHDR");
  // width/height are big-endian 32-bit
  REQUIRE(static_cast<unsigned char>(png[19]) == 3);
  REQUIRE(static_cast<unsigned char>(png[23]) == 2);
  REQUIRE(static_cast<unsigned char>(png[24]) == 8);  // bit depth
  REQUIRE(static_cast<unsigned char>(png[25]) == 2);  // truecolor
  REQUIRE(png.substr(png.size() - 8, 4) == "IEND");
}

TEST_CASE("svg render groups strokes per instance", "[raster]") {
  Scene scene = cross_scene();
  scene.gt_instances = {make_group(scene.strokes, {0}, "a"),
                        make_group(scene.strokes, {1}, "b")};
  const std::string svg = render_svg(scene, *scene.gt_instances, 1.5);
  REQUIRE(svg.find("<?xml") == 0);
  REQUIRE(svg.find("xmlns=\"http://www.w3.org/2000/svg\"") !=
          std::string::npos);
  REQUIRE(svg.find("id=\"instance-0\"") != std::string::npos);
  REQUIRE(svg.find("id=\"instance-1\"") != std::string::npos);
  size_t paths = 0;
  for (size_t pos = svg.find("<path"); pos != std::string::npos;
       pos = svg.find("<path", pos + 1))
    ++paths;
  REQUIRE(paths == scene.strokes.size());
  REQUIRE(render_svg(scene, *scene.gt_instances, 1.5) == svg);

  StrokeGroup bad;
  bad.stroke_indices = {0};
  REQUIRE_THROWS_AS(render_svg(scene, {bad}, 1.0), std::invalid_argument);
}
