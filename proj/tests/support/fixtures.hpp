#pragma once

#include <cstdint>

#include "prefine/core/homography.hpp"
#include "prefine/core/raster.hpp"
#include "prefine/pyramid/adaptive_pyramid.hpp"

namespace prefine::testing {

/// Uniform noise in [0, 1).
Raster random_raster(int width, int height, int channels, std::uint64_t seed, Point origin = {});

/// Random mask with roughly `density` of the pixels set.
Mask random_mask(int width, int height, double density, std::uint64_t seed, Point origin = {});

/// Band-limited pseudo-natural texture in [0.05, 0.95]: a sum of random
/// oriented sinusoids at octave-spaced frequencies with 1/f amplitudes, plus
/// soft blobs. `period` is the wavelength of the coarsest component in pixels.
Raster texture(int width, int height, int channels, std::uint64_t seed, double period = 256.0);

/// Checkerboard of `squares` x `squares` cells of `cell` pixels.
Raster checkerboard(int squares, int cell, float dark = 0.1f, float light = 0.9f);

/// Separable Gaussian blur with clamp-to-edge borders (radius ceil(3 sigma)).
Raster gaussian_blur(const Raster& img, double sigma);

/// Box-average downsample by an integer factor (dims must divide).
Raster box_downsample(const Raster& img, int factor);

/// Crop in local coordinates; origin of the result is {0, 0}.
Raster crop_local(const Raster& img, int x, int y, int width, int height);

/// Peak signal-to-noise ratio for [0, 1] data, optionally restricted to a mask.
double psnr(const Raster& a, const Raster& b, const Mask* where = nullptr);

double max_abs_diff(const Raster& a, const Raster& b);

double mean(const Raster& img, const Mask* where = nullptr);

/// Smooth random homography close to identity (perspective terms included).
Homography jitter_homography(std::uint64_t seed, double translate, double linear, double perspective);

/// Ground truth, its reduction by 2 and by 4 (the reference), all produced
/// by the oracle reduce over a fully valid image.
struct ZoomScene {
  Raster gt;
  Raster half;
  Raster reference;
};

ZoomScene zoom_scene(int size, std::uint64_t seed);

/// Tile-by-tile comparison of pixels, confidence and validity on every level.
bool same_pixels(const pyramid::AdaptivePyramid& a, const pyramid::AdaptivePyramid& b);

/// same_pixels() plus feature store, regions, bounds and tracking prior.
bool same_model(const pyramid::AdaptivePyramid& a, const pyramid::AdaptivePyramid& b);

}  // namespace prefine::testing
