#include "prefine/fusion/merge.hpp"

#include <algorithm>
#include <stdexcept>

#include "prefine/simd/kernels.hpp"

namespace prefine::fusion {
namespace {

PixelRect level_rect(const ObservationPacket& p, int level) {
  return level == p.l_max() ? p.levels.top_gaussian.image.rect() : p.levels.laplacian.at(level).image.rect();
}

const MaskedRaster& level_data(const ObservationPacket& p, int level) {
  return level == p.l_max() ? p.levels.top_gaussian : p.levels.laplacian.at(level);
}

// Level-map value at the base pixel co-located with each pixel of `rect`.
Raster level_confidence(const ObservationPacket& p, const PixelRect& rect, int level) {
  const int k = level - p.l_min();
  const Raster& lm = p.level_map.image;
  const PixelRect br = lm.rect();
  Raster out(rect.width, rect.height, 1, {rect.x0, rect.y0}, p.fallback_level);
  for (int y = 0; y < rect.height; ++y) {
    const int by = ((rect.y0 + y) << k) - br.y0;
    if (by < 0 || by >= br.height) continue;
    float* dst = out.row(0, y);
    const float* src = lm.row(0, by);
    const std::uint8_t* valid = p.level_map.mask.row(by);
    for (int x = 0; x < rect.width; ++x) {
      const int bx = ((rect.x0 + x) << k) - br.x0;
      if (bx >= 0 && bx < br.width && valid[bx]) dst[x] = src[bx];
    }
  }
  return out;
}

std::size_t write_level(pyramid::LevelGrid& grid, const Raster& values, const Raster& conf, const Mask& replace,
                        const Mask& fill, std::size_t& tiles_written, std::size_t& tiles_allocated) {
  const auto& kernels = simd::active_kernels();
  const PixelRect rect = values.rect();
  const pyramid::TileRect tr = pyramid::tiles_covering(rect);
  const int channels = values.channels();
  std::size_t written = 0;
  for (int q = tr.q0; q <= tr.q1; ++q) {
    for (int p = tr.p0; p <= tr.p1; ++p) {
      const PixelRect part = intersect(rect, pyramid::tile_pixel_rect(p, q));
      if (part.empty()) continue;
      bool any = false;
      for (int y = part.y0; y < part.y1() && !any; ++y) {
        const std::uint8_t* r = replace.row(y - rect.y0) + (part.x0 - rect.x0);
        const std::uint8_t* f = fill.row(y - rect.y0) + (part.x0 - rect.x0);
        for (int x = 0; x < part.width; ++x) {
          if (r[x] || f[x]) {
            any = true;
            break;
          }
        }
      }
      if (!any) continue;
      const bool existed = grid.find(p, q) != nullptr;
      pyramid::Tile& tile = grid.obtain(p, q);
      std::size_t tile_written = 0;
      for (int y = part.y0; y < part.y1(); ++y) {
        const int ly = y - rect.y0;
        const int ty = y - q * pyramid::kTileSize;
        const int tx = part.x0 - p * pyramid::kTileSize;
        const int lx = part.x0 - rect.x0;
        simd::MergeRow row{};
        for (int c = 0; c < 3; ++c) {
          const int cc = std::min(c, channels - 1);
          row.model[c] = tile.pixels.row(cc, ty) + tx;
          row.obs[c] = values.row(cc, ly) + lx;
        }
        row.model_confidence = tile.confidence.row(0, ty) + tx;
        row.model_valid = tile.valid.row(ty) + tx;
        row.obs_confidence = conf.row(0, ly) + lx;
        row.replace_allowed = replace.row(ly) + lx;
        row.fill_allowed = fill.row(ly) + lx;
        row.n = static_cast<std::size_t>(part.width);
        tile_written += kernels.merge_row(row);
      }
      if (!existed) ++tiles_allocated;
      if (tile_written > 0) ++tiles_written;
      written += tile_written;
    }
  }
  return written;
}

}  // namespace

std::map<int, Mask> model_empty_masks(const pyramid::AdaptivePyramid& model, const ObservationPacket& packet) {
  std::map<int, Mask> out;
  for (int l = packet.l_min(); l <= packet.l_max(); ++l) {
    const PixelRect rect = level_rect(packet, l);
    Mask empty(rect.width, rect.height, {rect.x0, rect.y0}, true);
    if (!rect.empty() && l <= model.top_level()) {
      const Mask have = model.reconstruct(l, rect).mask;
      for (std::size_t i = 0; i < empty.bits().size(); ++i) empty.bits()[i] = have.bits()[i] ? 0 : 1;
    }
    out.emplace(l, std::move(empty));
  }
  return out;
}

MergeSummary merge_observation(pyramid::AdaptivePyramid& model, const ObservationPacket& packet) {
  if (packet.l_min() < model.min_level() || packet.l_max() != model.top_level()) {
    throw std::logic_error("merge_observation: packet levels do not fit the model");
  }
  if (packet.levels.top_gaussian.image.channels() != model.channels()) {
    throw std::logic_error("merge_observation: channel count differs from the model");
  }
  const auto& kernels = simd::active_kernels();
  const std::map<int, Mask> empty = model_empty_masks(model, packet);

  std::map<int, Mask> interior;
  if (packet.replace && packet.l_min() < packet.l_max()) {
    Mask base = packet.levels.laplacian.at(packet.l_min()).mask;
    if (packet.accept.rect() != base.rect()) throw std::logic_error("merge_observation: accept mask grid differs");
    kernels.mask_and(base.bits().data(), base.bits().data(), packet.accept.bits().data(), base.bits().size());
    interior = pyramid::interior_masks(base, packet.l_min(), packet.l_max());
  }

  MergeSummary summary;
  for (int l = packet.l_min(); l <= packet.l_max(); ++l) {
    const MaskedRaster& data = level_data(packet, l);
    const PixelRect rect = data.image.rect();
    if (rect.empty()) continue;
    Mask fill = data.mask;
    const Mask& e = empty.at(l);
    kernels.mask_and(fill.bits().data(), fill.bits().data(), e.bits().data(), fill.bits().size());
    const auto it = interior.find(l);
    const Mask replace = it != interior.end() ? it->second : Mask(rect.width, rect.height, {rect.x0, rect.y0});
    const Raster conf = level_confidence(packet, rect, l);
    std::size_t tiles = 0;
    const std::size_t n = write_level(model.grid(l), data.image, conf, replace, fill, tiles, summary.tiles_allocated);
    if (n > 0) {
      summary.pixels_written[l] = n;
      summary.tiles_written[l] = tiles;
      summary.total_pixels += n;
    }
  }
  return summary;
}

void update_features(pyramid::AdaptivePyramid& model, const registration::FeatureSet& obs_features,
                     const Polygon& quad, bool passed_gate) {
  if (!passed_gate) return;
  const double s = level_scale(model.min_level());
  registration::FeatureSet kept;
  for (const auto& f : model.features()) {
    if (!contains(quad, {f.x * s, f.y * s})) kept.push_back(f);
  }
  kept.insert(kept.end(), obs_features.begin(), obs_features.end());
  model.features() = std::move(kept);
}

}  // namespace prefine::fusion
