#pragma once

#include "prefine/core/warp.hpp"

namespace prefine::registration {

struct FlowConfig {
  double pyr_scale = 0.5;
  int levels = 5;
  int window = 25;
  int iterations = 10;
  int poly_n = 5;
  double poly_sigma = 1.1;
  bool gaussian = false;  // Gaussian instead of box averaging window
};

/// Dense flow f on the model grid with obs(x + f(x)) ~ model(x). Both inputs
/// are single-channel on the same grid; pixels outside `valid` get f = 0.
/// Pixels of either image outside `valid` are filled from the other image.
/// Both are mean-shifted over `valid` before 8-bit quantization, so a global
/// brightness offset does not bias the flow.
FlowField dense_flow(const Raster& model, const Raster& obs, const Mask& valid, const FlowConfig& cfg = {});

/// Bilinear resize of a flow field `levels` pyramid levels finer (positions
/// X / 2^levels on the coarse grid, clamped to it), vectors scaled by
/// 2^levels. The result covers `target` on the fine grid.
FlowField upscale_flow(const FlowField& flow, int levels, const PixelRect& target);

}  // namespace prefine::registration
