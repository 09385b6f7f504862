#pragma once

#include <map>

#include "prefine/core/raster.hpp"

namespace prefine::pyramid {

/// Laplacian levels [base, top) plus the Gaussian at `top`, all on the global
/// pixel grids of their levels.
struct LaplacianStack {
  int base = 0;
  int top = 0;
  std::map<int, MaskedRaster> laplacian;
  MaskedRaster top_gaussian;
};

/// Smallest level t >= base at which min(width, height) / 2^(t - base) < 8,
/// raised to `model_top` when that is higher.
int decomposition_top(int width, int height, int base_level, int model_top);

/// Expansion onto a level without Laplacian data: only fine pixels whose taps
/// are all valid receive a value, so validity never spreads past the data.
MaskedRaster expand_level(const MaskedRaster& coarse, const PixelRect& fine_rect);

/// Gaussian chain G_base = img, G_{l+1} = reduce(G_l); then top-down
/// L_l = G_l - expand(R_{l+1}) where R is the reconstruction of the level
/// above, so that reconstruct() returns G_l at every valid pixel.
/// Throws std::invalid_argument for images smaller than 2x2 or top < base.
LaplacianStack decompose(const Raster& img, const Mask& mask, int top_level, int base_level);

/// Builds the Laplacian levels from a ready Gaussian chain (levels base..top).
LaplacianStack laplacians_from_gaussians(std::map<int, MaskedRaster> gaussians, int base, int top);

/// R_l = L + E with E = expand(R_{l+1}). At pixels where L is valid, E counts
/// if any of its taps is valid; elsewhere it needs all taps (as expand_level).
/// R is valid where L is or where E has full support.
MaskedRaster reconstruct_level(const MaskedRaster& laplacian, const MaskedRaster& above);

/// For each Laplacian level [base, top) of a decomposition of data valid on
/// `valid`: the pixels whose detail is the plain (unmasked) band-pass value.
/// Level chain I_base = valid, I_{l+1} = pixels whose whole 5x5 reduce support
/// lies in I_l; a level-l pixel qualifies if it is in I_l and every expand tap
/// lies in I_{l+1}.
std::map<int, Mask> interior_masks(const Mask& valid, int base, int top);

/// Reconstruction of a stack down to `level` (>= base).
MaskedRaster reconstruct(const LaplacianStack& stack, int level);

}  // namespace prefine::pyramid
