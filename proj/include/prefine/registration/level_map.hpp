#pragma once

#include "prefine/core/homography.hpp"
#include "prefine/core/raster.hpp"

namespace prefine::registration {

/// Real-valued pyramid level of observation pixel (x, y) under `h`
/// (observation -> level 0): log2 of the local linear scale,
/// 0.5 * log2(|det H| / |w|^3) with w = h31 x + h32 y + h33.
double level_at(const Homography& h, double x, double y);

struct LevelBounds {
  double min_level = 0.0;
  double max_level = 0.0;
  int l_min = 0;       // floor of min_level
  int l_max_hint = 0;  // ceil of max_level
};

/// Extremes of level_at over the observation (attained at its corners, since
/// the level is monotone in |w|). Levels within 1/16 of an integer snap to it.
/// Throws std::domain_error for a singular homography.
LevelBounds level_bounds(const Homography& h, int width, int height);

struct WarpedObservation {
  MaskedRaster image;  // on the global grid of `level`
  Raster level_map;    // real level per pixel, 0 outside coverage
  int level = 0;
};

/// Pixel rectangle at `level` spanned by the observation's footprint.
PixelRect footprint_rect(const Homography& h, int width, int height, int level);

/// Warps the observation into the grid of level `level` (pixel i at world
/// position i * 2^level) over its footprint and fills the level map.
WarpedObservation warp_to_level(const Raster& obs, const Homography& h, int level);

}  // namespace prefine::registration
