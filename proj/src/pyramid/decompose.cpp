#include "prefine/pyramid/decompose.hpp"

#include <algorithm>
#include <stdexcept>

#include "prefine/core/pyramid_ops.hpp"
#include "prefine/simd/kernels.hpp"

namespace prefine::pyramid {

int decomposition_top(int width, int height, int base_level, int model_top) {
  const int m = std::min(width, height);
  int t = base_level;
  while ((m >> (t - base_level)) >= 8 && t - base_level < 30) ++t;
  // m >> d < 8 is equivalent to m / 2^d < 8 for the integer m.
  return std::max(t, model_top);
}

MaskedRaster expand_level(const MaskedRaster& coarse, const PixelRect& fine_rect) {
  return expand_to(coarse.image, coarse.mask, fine_rect, 1.0f);
}

MaskedRaster reconstruct_level(const MaskedRaster& laplacian, const MaskedRaster& above) {
  const auto& k = simd::active_kernels();
  const PixelRect rect = laplacian.image.rect();
  Mask full;
  MaskedRaster e = expand_to(above.image, above.mask, rect, full);
  // Where L has data the expansion counts wherever any tap is valid; elsewhere
  // only with full support, so validity does not creep past the data.
  const std::size_t n = static_cast<std::size_t>(rect.width);
  for (int y = 0; y < rect.height; ++y) {
    k.mask_and(e.mask.row(y), e.mask.row(y), laplacian.mask.row(y), n);
    k.mask_or(e.mask.row(y), e.mask.row(y), full.row(y), n);
  }
  MaskedRaster out{Raster(rect.width, rect.height, laplacian.image.channels(), {rect.x0, rect.y0}),
                   Mask(rect.width, rect.height, {rect.x0, rect.y0})};
  for (int y = 0; y < rect.height; ++y) {
    for (int c = 0; c < out.image.channels(); ++c) {
      k.add_masked(out.image.row(c, y), laplacian.image.row(c, y), laplacian.mask.row(y), e.image.row(c, y),
                   e.mask.row(y), n);
    }
    k.mask_or(out.mask.row(y), laplacian.mask.row(y), full.row(y), n);
  }
  return out;
}

LaplacianStack laplacians_from_gaussians(std::map<int, MaskedRaster> gaussians, int base, int top) {
  const auto& k = simd::active_kernels();
  LaplacianStack stack;
  stack.base = base;
  stack.top = top;
  stack.top_gaussian = gaussians.at(top);
  MaskedRaster above = stack.top_gaussian;
  for (int l = top - 1; l >= base; --l) {
    MaskedRaster& g = gaussians.at(l);
    const PixelRect rect = g.image.rect();
    const MaskedRaster e = expand_to(above.image, above.mask, rect);
    MaskedRaster lap{Raster(rect.width, rect.height, g.image.channels(), {rect.x0, rect.y0}), g.mask};
    const std::size_t n = static_cast<std::size_t>(rect.width);
    for (int y = 0; y < rect.height; ++y) {
      for (int c = 0; c < g.image.channels(); ++c) {
        float* dst = lap.image.row(c, y);
        k.subtract_masked(dst, g.image.row(c, y), e.image.row(c, y), e.mask.row(y), n);
        const std::uint8_t* gv = g.mask.row(y);
        for (std::size_t i = 0; i < n; ++i)
          if (!gv[i]) dst[i] = 0.0f;
      }
    }
    above = reconstruct_level(lap, above);
    stack.laplacian.emplace(l, std::move(lap));
    gaussians.erase(l + 1);
  }
  return stack;
}

LaplacianStack decompose(const Raster& img, const Mask& mask, int top_level, int base_level) {
  require_same_grid(img, mask);
  if (top_level < base_level) throw std::invalid_argument("decompose: top level below base level");
  if (img.width() < 2 || img.height() < 2) throw std::invalid_argument("decompose: image smaller than 2x2");
  std::map<int, MaskedRaster> g;
  g.emplace(base_level, MaskedRaster{img, mask});
  for (int l = base_level; l < top_level; ++l) {
    const MaskedRaster& cur = g.at(l);
    g.emplace(l + 1, reduce(cur.image, cur.mask));
  }
  return laplacians_from_gaussians(std::move(g), base_level, top_level);
}

std::map<int, Mask> interior_masks(const Mask& valid, int base, int top) {
  std::map<int, Mask> out;
  Mask cur = valid;
  for (int l = base; l < top; ++l) {
    Mask next = reduce_mask(cur, 1.0f);
    Mask inner = expand_support(next, cur.rect());
    const auto& k = simd::active_kernels();
    for (int y = 0; y < inner.height(); ++y) {
      k.mask_and(inner.row(y), inner.row(y), cur.row(y), static_cast<std::size_t>(inner.width()));
    }
    out.emplace(l, std::move(inner));
    cur = std::move(next);
  }
  return out;
}

MaskedRaster reconstruct(const LaplacianStack& stack, int level) {
  if (level < stack.base || level > stack.top) throw std::out_of_range("reconstruct: level outside the stack");
  MaskedRaster g = stack.top_gaussian;
  for (int l = stack.top - 1; l >= level; --l) g = reconstruct_level(stack.laplacian.at(l), g);
  return g;
}

}  // namespace prefine::pyramid
