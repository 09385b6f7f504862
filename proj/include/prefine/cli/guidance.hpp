#pragma once

#include "prefine/pyramid/adaptive_pyramid.hpp"

namespace prefine::cli {

/// Finest Laplacian level holding data at each pixel of `level` over the
/// model's data bounds: a level with data anywhere inside the pixel's block
/// counts. Pixels covered only by the top Gaussian get top_level, pixels
/// without data are invalid.
MaskedRaster finest_written_level(const pyramid::AdaptivePyramid& model, int level);

/// RGB refinement guidance at `level` over the data bounds. Green is
/// (top - finest) / (top - min_level) clamped to [0, 1]; red marks pixels with
/// data outside the reference region; blue is 0.
MaskedRaster render_guidance(const pyramid::AdaptivePyramid& model, int level = 0);

}  // namespace prefine::cli
