#pragma once

#include "sketchseg/compose.hpp"
#include "sketchseg/core.hpp"
#include "sketchseg/detect.hpp"
#include "sketchseg/io.hpp"
#include "sketchseg/metrics.hpp"
#include "sketchseg/parallel.hpp"
#include "sketchseg/png.hpp"
#include "sketchseg/postproc.hpp"
#include "sketchseg/raster.hpp"
#include "sketchseg/rng.hpp"
#include "sketchseg/shapes.hpp"
#include "sketchseg/tune.hpp"
