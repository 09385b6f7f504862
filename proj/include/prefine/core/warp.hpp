#pragma once

#include "prefine/core/homography.hpp"
#include "prefine/core/raster.hpp"

namespace prefine {

/// Per-pixel displacement field: channel 0 = dx, channel 1 = dy, in pixels of
/// the grid the field lives on.
using FlowField = Raster;

FlowField make_flow(int width, int height, Point origin = {});

/// Inverse-maps every pixel of `target` (a rect at `level`, whose pixel i sits at
/// level-0 position i * 2^level) through H^-1 into source pixel coordinates and
/// samples bilinearly. H maps source pixels to level-0 positions.
///
/// A target pixel is covered iff every bilinear tap with nonzero weight lies
/// inside the source (and is valid in `source_valid`, when given). Uncovered
/// pixels are 0.
MaskedRaster warp_homography(const Raster& img, const Homography& h, const PixelRect& target,
                             int level = 0, const Mask* source_valid = nullptr);

/// out(x, y) = img sampled at (x, y) + flow(x, y), local pixel coordinates.
/// `flow` must have the dimensions of `img`; the result keeps img's origin.
MaskedRaster warp_flow(const Raster& img, const FlowField& flow, const Mask* source_valid = nullptr);

}  // namespace prefine
