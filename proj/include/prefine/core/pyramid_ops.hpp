#pragma once

#include "prefine/core/raster.hpp"

namespace prefine {

/// Output grid of reduce(): pixels j whose fine position 2j lies inside `fine`.
PixelRect reduce_rect(const PixelRect& fine);

/// Coarse pixels that carry nonzero expand weight for some pixel of `fine`.
PixelRect expand_source_rect(const PixelRect& fine);

/// Masked 5-tap low-pass followed by decimation at globally even positions.
/// Taps are renormalized over valid input pixels; an output pixel is valid iff
/// at least half of the kernel weight fell on valid input pixels.
MaskedRaster reduce(const Raster& img, const Mask& mask);

/// Validity-only variant of reduce(): valid iff the valid tap weight >= min_weight.
/// min_weight = 1 requires every tap of the 5x5 support to be valid.
Mask reduce_mask(const Mask& mask, float min_weight);

/// Masked expand of a coarse raster onto the fine grid `fine_rect`. Each fine
/// pixel is renormalized over its valid coarse taps. With the default
/// min_weight a pixel is valid iff any tap is; min_weight = 1 requires all
/// taps (the tap weights are dyadic, so the sum is exact).
MaskedRaster expand_to(const Raster& coarse, const Mask& coarse_mask, const PixelRect& fine_rect,
                       float min_weight = 0.0f);

/// As expand_to() with the any-tap rule, also reporting in `full_support` the
/// pixels whose taps are all valid.
MaskedRaster expand_to(const Raster& coarse, const Mask& coarse_mask, const PixelRect& fine_rect,
                       Mask& full_support);

/// Unmasked expand to `target_w` x `target_h`; target dims must be 2*dim-1 or 2*dim.
Raster expand(const Raster& img, int target_w, int target_h);

/// Fine pixels of `fine_rect` all of whose nonzero expand taps are valid in `coarse`.
Mask expand_support(const Mask& coarse, const PixelRect& fine_rect);

}  // namespace prefine
