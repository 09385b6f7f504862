#include "prefine/pyramid/tile.hpp"

#include <algorithm>
#include <cstring>

namespace prefine::pyramid {

TileRect bounding_union(const TileRect& a, const TileRect& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  return {std::min(a.p0, b.p0), std::min(a.q0, b.q0), std::max(a.p1, b.p1), std::max(a.q1, b.q1)};
}

TileRect tiles_covering(const PixelRect& rect) {
  if (rect.empty()) return {};
  return {floor_div(rect.x0, kTileSize), floor_div(rect.y0, kTileSize), floor_div(rect.x1() - 1, kTileSize),
          floor_div(rect.y1() - 1, kTileSize)};
}

WorldRect tile_world_rect(int level, int p, int q) {
  const double span = kTileSize * level_scale(level);
  return {p * span, q * span, (p + 1) * span, (q + 1) * span};
}

Tile::Tile(int level_, int p_, int q_, int channels)
    : level(level_),
      p(p_),
      q(q_),
      pixels(kTileSize, kTileSize, channels, {p_ * kTileSize, q_ * kTileSize}),
      confidence(kTileSize, kTileSize, 1, {p_ * kTileSize, q_ * kTileSize}, kUnwrittenConfidence),
      valid(kTileSize, kTileSize, {p_ * kTileSize, q_ * kTileSize}) {}

void LevelGrid::set_level(int level) {
  level_ = level;
  for (auto& t : tiles_) t->level = level;
}

void LevelGrid::grow(const TileRect& rect) {
  if (rect.empty()) return;
  const TileRect next = bounding_union(bbox_, rect);
  if (next == bbox_) return;
  std::vector<std::int32_t> nodes(static_cast<std::size_t>(next.cols()) * next.rows(), kAbsent);
  for (int q = bbox_.q0; q <= bbox_.q1 && !bbox_.empty(); ++q) {
    const std::size_t src = static_cast<std::size_t>(q - bbox_.q0) * bbox_.cols();
    const std::size_t dst = static_cast<std::size_t>(q - next.q0) * next.cols() + (bbox_.p0 - next.p0);
    std::copy_n(nodes_.begin() + static_cast<std::ptrdiff_t>(src), bbox_.cols(),
                nodes.begin() + static_cast<std::ptrdiff_t>(dst));
  }
  nodes_ = std::move(nodes);
  bbox_ = next;
}

std::int32_t LevelGrid::node(int p, int q) const {
  if (!bbox_.contains(p, q)) return kAbsent;
  return nodes_[static_cast<std::size_t>(q - bbox_.q0) * bbox_.cols() + (p - bbox_.p0)];
}

Tile* LevelGrid::find(int p, int q) {
  const std::int32_t i = node(p, q);
  return i == kAbsent ? nullptr : tiles_[static_cast<std::size_t>(i)].get();
}

const Tile* LevelGrid::find(int p, int q) const {
  const std::int32_t i = node(p, q);
  return i == kAbsent ? nullptr : tiles_[static_cast<std::size_t>(i)].get();
}

Tile& LevelGrid::obtain(int p, int q) {
  if (Tile* t = find(p, q)) return *t;
  grow({p, q, p, q});
  tiles_.push_back(std::make_unique<Tile>(level_, p, q, channels_));
  nodes_[static_cast<std::size_t>(q - bbox_.q0) * bbox_.cols() + (p - bbox_.p0)] =
      static_cast<std::int32_t>(tiles_.size() - 1);
  return *tiles_.back();
}

MaskedRaster LevelGrid::read(const PixelRect& rect) const {
  MaskedRaster out{Raster(rect.width, rect.height, channels_, {rect.x0, rect.y0}),
                   Mask(rect.width, rect.height, {rect.x0, rect.y0})};
  const TileRect tr = tiles_covering(rect);
  for (int q = tr.q0; q <= tr.q1; ++q) {
    for (int p = tr.p0; p <= tr.p1; ++p) {
      const Tile* t = find(p, q);
      if (t == nullptr) continue;
      copy_overlap(t->pixels, out.image);
      copy_overlap(t->valid, out.mask);
    }
  }
  return out;
}

Mask LevelGrid::read_valid(const PixelRect& rect) const {
  Mask out(rect.width, rect.height, {rect.x0, rect.y0});
  const TileRect tr = tiles_covering(rect);
  for (int q = tr.q0; q <= tr.q1; ++q)
    for (int p = tr.p0; p <= tr.p1; ++p)
      if (const Tile* t = find(p, q)) copy_overlap(t->valid, out);
  return out;
}

Raster LevelGrid::read_confidence(const PixelRect& rect) const {
  Raster out(rect.width, rect.height, 1, {rect.x0, rect.y0}, kUnwrittenConfidence);
  const TileRect tr = tiles_covering(rect);
  for (int q = tr.q0; q <= tr.q1; ++q)
    for (int p = tr.p0; p <= tr.p1; ++p)
      if (const Tile* t = find(p, q)) copy_overlap(t->confidence, out);
  return out;
}

void LevelGrid::store(const MaskedRaster& src, const Raster* conf, float constant_conf) {
  require_same_grid(src.image, src.mask);
  if (src.image.channels() != channels_) throw std::invalid_argument("channel count differs from the grid");
  const PixelRect rect = src.image.rect();
  const TileRect tr = tiles_covering(rect);
  for (int q = tr.q0; q <= tr.q1; ++q) {
    for (int p = tr.p0; p <= tr.p1; ++p) {
      const PixelRect part = intersect(rect, tile_pixel_rect(p, q));
      bool any = false;
      for (int y = part.y0; y < part.y1() && !any; ++y) {
        const std::uint8_t* m = src.mask.row(y - rect.y0) + (part.x0 - rect.x0);
        any = std::any_of(m, m + part.width, [](std::uint8_t b) { return b != 0; });
      }
      if (!any) continue;
      Tile& t = obtain(p, q);
      for (int y = part.y0; y < part.y1(); ++y) {
        const int sy = y - rect.y0;
        const int ty = y - t.pixels.origin().y;
        const std::uint8_t* m = src.mask.row(sy);
        for (int x = part.x0; x < part.x1(); ++x) {
          const int sx = x - rect.x0;
          if (!m[sx]) continue;
          const int tx = x - t.pixels.origin().x;
          for (int c = 0; c < channels_; ++c) t.pixels.at(c, tx, ty) = src.image.at(c, sx, sy);
          t.confidence.at(0, tx, ty) = conf ? conf->at(0, sx, sy) : constant_conf;
          t.valid.set(tx, ty, true);
        }
      }
    }
  }
}

PixelRect LevelGrid::valid_bounds() const {
  PixelRect out{};
  for (const auto& t : tiles_) {
    int x0 = kTileSize, y0 = kTileSize, x1 = -1, y1 = -1;
    for (int y = 0; y < kTileSize; ++y) {
      const std::uint8_t* m = t->valid.row(y);
      for (int x = 0; x < kTileSize; ++x) {
        if (!m[x]) continue;
        x0 = std::min(x0, x);
        x1 = std::max(x1, x);
        y0 = std::min(y0, y);
        y1 = std::max(y1, y);
      }
    }
    if (x1 < 0) continue;
    const Point o = t->pixels.origin();
    out = prefine::bounding_union(out, PixelRect::from_bounds(o.x + x0, o.y + y0, o.x + x1 + 1, o.y + y1 + 1));
  }
  return out;
}

PixelRect LevelGrid::allocated_bounds() const {
  PixelRect out{};
  for (const auto& t : tiles_) out = prefine::bounding_union(out, tile_pixel_rect(t->p, t->q));
  return out;
}

}  // namespace prefine::pyramid
