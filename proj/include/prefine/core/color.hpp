#pragma once

#include "prefine/core/raster.hpp"

namespace prefine {

/// Rec. 601 luma 0.299 R + 0.587 G + 0.114 B. Throws std::invalid_argument
/// unless `img` has 3 channels.
Raster to_luminance(const Raster& img);

/// 1-channel images pass through unchanged; 3-channel images go through to_luminance().
Raster gray_view(const Raster& img);

}  // namespace prefine
