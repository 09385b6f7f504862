#pragma once

#include "prefine/core/raster.hpp"

namespace prefine {

/// Binary morphology with the discrete disk {(dx, dy) : dx^2 + dy^2 <= r^2}.
///
/// Pixels outside the mask count as true for erosion and false for dilation,
/// so the image border neither eats into nor grows regions.
Mask erode(const Mask& mask, int radius);
Mask dilate(const Mask& mask, int radius);

inline Mask open(const Mask& mask, int radius) { return dilate(erode(mask, radius), radius); }
inline Mask close(const Mask& mask, int radius) { return erode(dilate(mask, radius), radius); }

/// Opening with radius r_open followed by closing with radius r_close.
Mask morph_open_close(const Mask& mask, int r_open = 3, int r_close = 4);

}  // namespace prefine
