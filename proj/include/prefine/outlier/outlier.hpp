#pragma once

#include <map>

#include "prefine/pyramid/adaptive_pyramid.hpp"

namespace prefine::outlier {

/// Denominator floor of the relative error: one 8-bit quantization step.
inline constexpr float kErrorEpsilon = 1.0f / 255.0f;

struct OutlierReport {
  bool full_image_pass = true;
  double std_obs = 0.0;
  double std_model = 0.0;
  int checked_level = 0;
  std::size_t overlap_pixels = 0;
  double rejected_pixel_fraction = 0.0;
};

/// Observation decomposition together with the pixels of each Laplacian
/// level that carry plain band-pass detail (see pyramid::interior_masks).
struct ObservationLevels {
  const pyramid::LaplacianStack* stack = nullptr;
  const std::map<int, Mask>* interior = nullptr;
};

/// Compares the standard deviation of the observation's Laplacian `level`
/// with the model's over their common support (per channel, averaged). Passes
/// iff std_obs >= (1 - tolerance) * std_model, or when there is no overlap.
OutlierReport full_image_check(const ObservationLevels& obs, const pyramid::AdaptivePyramid& model, int level,
                               double tolerance = 0.0);

/// E = sum over levels [first_level, end_level) of |M - I| / max(min(|M|, |I|), eps)
/// on the luminance of the Laplacian levels, on the observation's base grid.
/// Coarser levels are read at the ancestor pixel (x >> k, y >> k). A level
/// contributes only where the observation detail is interior and the model
/// has data.
Raster per_pixel_error(const ObservationLevels& obs, const pyramid::AdaptivePyramid& model, int first_level,
                       int end_level);

/// Accept mask on the grid of `error`: E <= threshold, cleaned by an opening
/// with radius r_open and a closing with radius r_close, then united with
/// `always_accept` (model-empty pixels) when given.
Mask outlier_mask(const Raster& error, float threshold, int r_open = 3, int r_close = 4,
                  const Mask* always_accept = nullptr);

}  // namespace prefine::outlier
