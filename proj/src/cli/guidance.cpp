#include "prefine/cli/guidance.hpp"

#include <algorithm>

#include "prefine/core/polygon.hpp"

namespace prefine::cli {

using pyramid::kTileSize;
using pyramid::LevelGrid;

namespace {

/// Stamps `level` into `finest` at every display pixel under a valid pixel of `g`.
void stamp_level(const LevelGrid& g, int display_level, Raster& finest, Mask& has) {
  const PixelRect out = finest.rect();
  const auto value = static_cast<float>(g.level());
  for (const auto& t : g.tiles()) {
    const int tx = t->p * kTileSize;
    const int ty = t->q * kTileSize;
    for (int y = 0; y < kTileSize; ++y) {
      const std::uint8_t* v = t->valid.row(y);
      for (int x = 0; x < kTileSize; ++x) {
        if (!v[x]) continue;
        PixelRect block;
        if (g.level() >= display_level) {
          const int k = g.level() - display_level;
          block = {(tx + x) << k, (ty + y) << k, 1 << k, 1 << k};
        } else {
          const int k = display_level - g.level();
          block = {(tx + x) >> k, (ty + y) >> k, 1, 1};
        }
        block = intersect(block, out);
        for (int by = block.y0; by < block.y1(); ++by) {
          float* f = finest.row(0, by - out.y0);
          std::uint8_t* h = has.row(by - out.y0);
          for (int bx = block.x0; bx < block.x1(); ++bx) {
            f[bx - out.x0] = value;
            h[bx - out.x0] = 1;
          }
        }
      }
    }
  }
}

}  // namespace

MaskedRaster finest_written_level(const pyramid::AdaptivePyramid& model, int level) {
  const PixelRect rect = world_to_level_rect(model.data_bounds(), level);
  MaskedRaster out{Raster(rect.width, rect.height, 1, {rect.x0, rect.y0}),
                   Mask(rect.width, rect.height, {rect.x0, rect.y0})};
  if (rect.empty()) return out;
  stamp_level(model.top_gaussian(), level, out.image, out.mask);
  for (int l = model.top_level() - 1; l >= model.min_level(); --l) stamp_level(model.laplacian(l), level, out.image, out.mask);
  return out;
}

MaskedRaster render_guidance(const pyramid::AdaptivePyramid& model, int level) {
  const MaskedRaster finest = finest_written_level(model, level);
  const PixelRect rect = finest.image.rect();
  MaskedRaster out{Raster(rect.width, rect.height, 3, {rect.x0, rect.y0}), finest.mask};
  const double span = model.top_level() - model.min_level();
  const double s = level_scale(level);
  for (int y = 0; y < rect.height; ++y) {
    const float* f = finest.image.row(0, y);
    const std::uint8_t* has = finest.mask.row(y);
    float* red = out.image.row(0, y);
    float* green = out.image.row(1, y);
    for (int x = 0; x < rect.width; ++x) {
      if (!has[x]) continue;
      const double g = span > 0.0 ? (model.top_level() - f[x]) / span : 1.0;
      green[x] = static_cast<float>(std::clamp(g, 0.0, 1.0));
      const Eigen::Vector2d centre((rect.x0 + x + 0.5) * s, (rect.y0 + y + 0.5) * s);
      red[x] = contains(model.reference_region(), centre) ? 0.0f : 1.0f;
    }
  }
  return out;
}

}  // namespace prefine::cli
