#pragma once

// Core engine. The CLI and HTTP server live in cli.hpp and server.hpp, which
// pull in extra dependencies.
#include "flymation/bundle.hpp"
#include "flymation/camera.hpp"
#include "flymation/compile.hpp"
#include "flymation/demogen.hpp"
#include "flymation/error.hpp"
#include "flymation/glyphs.hpp"
#include "flymation/ingest.hpp"
#include "flymation/io.hpp"
#include "flymation/math.hpp"
#include "flymation/model.hpp"
#include "flymation/png.hpp"
#include "flymation/raster.hpp"
#include "flymation/simplify.hpp"
#include "flymation/svg.hpp"
#include "flymation/timeline.hpp"
