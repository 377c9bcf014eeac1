#pragma once

#include "buildseg/ascii_grid.hpp"
#include "buildseg/augment.hpp"
#include "buildseg/error.hpp"
#include "buildseg/manifest.hpp"
#include "buildseg/metrics.hpp"
#include "buildseg/morphology.hpp"
#include "buildseg/png_io.hpp"
#include "buildseg/raster.hpp"
#include "buildseg/rectify.hpp"
#include "buildseg/rng.hpp"
#include "buildseg/tiling.hpp"
