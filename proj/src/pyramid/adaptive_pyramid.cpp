#include "prefine/pyramid/adaptive_pyramid.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "prefine/core/pyramid_ops.hpp"

namespace prefine::pyramid {
namespace {

// Confidence of a new coarse level: minimum over the valid fine pixels the
// coarse pixel sits on (2x2), falling back to the valid pixels of its 5x5 support.
Raster reduce_confidence(const Raster& conf, const Mask& fine_valid, const Mask& coarse_valid) {
  const PixelRect cr = coarse_valid.rect();
  const PixelRect fr = conf.rect();
  Raster out(cr.width, cr.height, 1, {cr.x0, cr.y0}, kUnwrittenConfidence);
  auto scan = [&](int cx, int cy, int lo, int hi) {
    float best = kUnwrittenConfidence;
    bool found = false;
    for (int y = 2 * cy + lo; y <= 2 * cy + hi; ++y) {
      for (int x = 2 * cx + lo; x <= 2 * cx + hi; ++x) {
        if (!fr.contains(x, y) || !fine_valid.at(x - fr.x0, y - fr.y0)) continue;
        best = std::min(best, conf.at(0, x - fr.x0, y - fr.y0));
        found = true;
      }
    }
    return found ? best : kUnwrittenConfidence;
  };
  for (int y = 0; y < cr.height; ++y) {
    for (int x = 0; x < cr.width; ++x) {
      if (!coarse_valid.at(x, y)) continue;
      float c = scan(cr.x0 + x, cr.y0 + y, 0, 1);
      if (c == kUnwrittenConfidence) c = scan(cr.x0 + x, cr.y0 + y, -2, 2);
      out.at(0, x, y) = c;
    }
  }
  return out;
}

}  // namespace

AdaptivePyramid::AdaptivePyramid(int channels, int min_level, int top_level)
    : channels_(channels), min_level_(min_level), top_level_(top_level), top_(top_level, channels) {
  if (top_level < min_level) throw std::invalid_argument("pyramid top level below its finest level");
  for (int l = min_level; l < top_level; ++l) laplacian_.emplace(l, LevelGrid(l, channels));
}

AdaptivePyramid AdaptivePyramid::init_from_reference(const Raster& img) {
  if (img.width() < 16 || img.height() < 16) throw std::invalid_argument("reference must be at least 16x16");
  Raster ref = img;
  ref.set_origin({});
  const int top = decomposition_top(ref.width(), ref.height(), 0, 0);
  const LaplacianStack stack = decompose(ref, Mask(ref.width(), ref.height(), {}, true), top, 0);
  AdaptivePyramid m(ref.channels(), 0, top);
  for (const auto& [level, lap] : stack.laplacian) m.laplacian(level).store(lap, nullptr, 0.0f);
  m.top_.store(stack.top_gaussian, nullptr, 0.0f);
  const double w = ref.width();
  const double h = ref.height();
  m.reference_region_ = {{0.0, 0.0}, {w, 0.0}, {w, h}, {0.0, h}};
  m.data_bounds_ = {0.0, 0.0, w, h};
  return m;
}

LevelGrid& AdaptivePyramid::laplacian(int level) {
  auto it = laplacian_.find(level);
  if (it == laplacian_.end()) throw std::out_of_range("no Laplacian level " + std::to_string(level));
  return it->second;
}

const LevelGrid& AdaptivePyramid::laplacian(int level) const {
  auto it = laplacian_.find(level);
  if (it == laplacian_.end()) throw std::out_of_range("no Laplacian level " + std::to_string(level));
  return it->second;
}

LevelGrid& AdaptivePyramid::grid(int level) { return level == top_level_ ? top_ : laplacian(level); }

const LevelGrid& AdaptivePyramid::grid(int level) const {
  return level == top_level_ ? top_ : laplacian(level);
}

void AdaptivePyramid::expand_lateral(int level, const TileRect& needed) { grid(level).grow(needed); }

void AdaptivePyramid::expand_up(int new_top) {
  if (new_top <= top_level_) throw std::invalid_argument("expand_up: new top must be above the current top");
  const int old_top = top_level_;
  const PixelRect rect = top_.valid_bounds();

  std::map<int, MaskedRaster> gauss;
  std::map<int, Raster> conf;
  gauss.emplace(old_top, top_.read(rect));
  conf.emplace(old_top, top_.read_confidence(rect));
  for (int l = old_top; l < new_top; ++l) {
    const MaskedRaster& g = gauss.at(l);
    MaskedRaster next = reduce(g.image, g.mask);
    // Only pixels whose whole support is valid survive, so the expansion of
    // the new levels never reaches outside the old top's valid area.
    next.mask = reduce_mask(g.mask, 1.0f);
    for (int c = 0; c < next.image.channels(); ++c)
      for (int y = 0; y < next.image.height(); ++y)
        for (int x = 0; x < next.image.width(); ++x)
          if (!next.mask.at(x, y)) next.image.at(c, x, y) = 0.0f;
    conf.emplace(l + 1, reduce_confidence(conf.at(l), g.mask, next.mask));
    gauss.emplace(l + 1, std::move(next));
  }
  const LaplacianStack stack = laplacians_from_gaussians(std::move(gauss), old_top, new_top);

  LevelGrid old = std::move(top_);
  old.store(stack.laplacian.at(old_top), &conf.at(old_top));
  laplacian_.emplace(old_top, std::move(old));
  for (int l = old_top + 1; l < new_top; ++l) {
    LevelGrid g(l, channels_);
    g.store(stack.laplacian.at(l), &conf.at(l));
    laplacian_.emplace(l, std::move(g));
  }
  top_ = LevelGrid(new_top, channels_);
  top_.store(stack.top_gaussian, &conf.at(new_top));
  top_level_ = new_top;
}

void AdaptivePyramid::expand_down(int new_min) {
  if (new_min >= min_level_) throw std::invalid_argument("expand_down: new finest level must be below the current one");
  for (int l = new_min; l < min_level_; ++l) laplacian_.emplace(l, LevelGrid(l, channels_));
  registration::rescale(features_, level_scale(min_level_ - new_min));
  min_level_ = new_min;
}

MaskedRaster AdaptivePyramid::reconstruct(int level, const PixelRect& rect) const {
  if (level > top_level_) throw std::out_of_range("reconstruct: level above the top Gaussian");
  std::map<int, PixelRect> rects;
  rects[level] = rect;
  for (int l = level; l < top_level_; ++l) rects[l + 1] = expand_source_rect(rects[l]);
  MaskedRaster g = top_.read(rects[top_level_]);
  for (int l = top_level_ - 1; l >= level; --l) {
    if (l >= min_level_) {
      g = reconstruct_level(laplacian(l).read(rects[l]), g);
    } else {
      g = expand_level(g, rects[l]);
    }
  }
  return g;
}

MaskedRaster AdaptivePyramid::flatten(const WorldRect& region, int level) const {
  const PixelRect rect = world_to_level_rect(region, level);
  if (rect.empty()) throw std::runtime_error("flatten: empty region");
  MaskedRaster out = reconstruct(level, rect);
  if (!out.mask.any()) throw std::runtime_error("flatten: region holds no model data");
  return out;
}

PyramidStats AdaptivePyramid::stats() const {
  PyramidStats s;
  s.min_level = min_level_;
  s.top_level = top_level_;
  for (const auto& [level, g] : laplacian_) {
    s.laplacian_tiles[level] = g.tile_count();
    s.total_tiles += g.tile_count();
    s.node_array_bytes += g.node_array_bytes();
  }
  s.top_tiles = top_.tile_count();
  s.total_tiles += s.top_tiles;
  s.node_array_bytes += top_.node_array_bytes();
  s.payload_bytes = s.total_tiles * tile_payload_bytes(channels_);
  return s;
}

std::size_t AdaptivePyramid::tile_count() const { return stats().total_tiles; }

}  // namespace prefine::pyramid
