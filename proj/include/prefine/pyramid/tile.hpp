#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

#include "prefine/core/raster.hpp"

namespace prefine::pyramid {

inline constexpr int kTileSize = 512;
inline constexpr int kTileShift = 9;

/// Confidence of pixels no observation has written yet.
inline constexpr float kUnwrittenConfidence = 1e9f;

/// Bytes of one tile payload as stored: pixels, confidence and a validity bitmask.
constexpr std::size_t tile_payload_bytes(int channels) {
  const std::size_t n = static_cast<std::size_t>(kTileSize) * kTileSize;
  return n * 4 * static_cast<std::size_t>(channels) + n * 4 + n / 8;
}

/// Inclusive rectangle of tile grid positions.
struct TileRect {
  int p0 = 0;
  int q0 = 0;
  int p1 = -1;
  int q1 = -1;

  [[nodiscard]] bool empty() const { return p1 < p0 || q1 < q0; }
  [[nodiscard]] int cols() const { return empty() ? 0 : p1 - p0 + 1; }
  [[nodiscard]] int rows() const { return empty() ? 0 : q1 - q0 + 1; }
  [[nodiscard]] bool contains(int p, int q) const { return p >= p0 && p <= p1 && q >= q0 && q <= q1; }
  friend bool operator==(const TileRect&, const TileRect&) = default;
};

TileRect bounding_union(const TileRect& a, const TileRect& b);

/// Tiles touched by a pixel rectangle of one level.
TileRect tiles_covering(const PixelRect& rect);

/// Pixel rectangle of tile (p, q).
inline PixelRect tile_pixel_rect(int p, int q) {
  return {p * kTileSize, q * kTileSize, kTileSize, kTileSize};
}

/// Level-0 world rectangle of tile (p, q) at `level`.
WorldRect tile_world_rect(int level, int p, int q);

struct Tile {
  int level = 0;
  int p = 0;
  int q = 0;
  Raster pixels;      // kTileSize^2, origin at the tile's first pixel
  Raster confidence;  // 1 channel, same grid
  Mask valid;

  Tile(int level, int p, int q, int channels);
};

/// Sparse grid of tiles for one level. Nodes cover a bounding box of tile
/// positions and hold an index into the tile store, or -1.
class LevelGrid {
 public:
  static constexpr std::int32_t kAbsent = -1;

  LevelGrid() = default;
  LevelGrid(int level, int channels) : level_(level), channels_(channels) {}

  LevelGrid(LevelGrid&&) noexcept = default;
  LevelGrid& operator=(LevelGrid&&) noexcept = default;

  [[nodiscard]] int level() const { return level_; }
  void set_level(int level);
  [[nodiscard]] int channels() const { return channels_; }
  [[nodiscard]] const TileRect& node_bbox() const { return bbox_; }

  /// Grows the node array to include `rect`. Never allocates tiles.
  void grow(const TileRect& rect);

  [[nodiscard]] Tile* find(int p, int q);
  [[nodiscard]] const Tile* find(int p, int q) const;

  /// Returns the tile at (p, q), allocating it (and growing the nodes) if needed.
  Tile& obtain(int p, int q);

  [[nodiscard]] std::size_t tile_count() const { return tiles_.size(); }
  [[nodiscard]] std::size_t node_array_bytes() const { return nodes_.size() * sizeof(std::int32_t); }

  /// Tiles in allocation order.
  [[nodiscard]] const std::vector<std::unique_ptr<Tile>>& tiles() const { return tiles_; }

  /// Pixel data of `rect` (pixels of absent tiles are invalid).
  [[nodiscard]] MaskedRaster read(const PixelRect& rect) const;
  [[nodiscard]] Mask read_valid(const PixelRect& rect) const;
  /// Confidence over `rect`; kUnwrittenConfidence where no tile exists.
  [[nodiscard]] Raster read_confidence(const PixelRect& rect) const;

  /// Writes the valid pixels of `src` with confidence `conf` (same grid as
  /// src, or a constant when null), allocating tiles that receive pixels.
  void store(const MaskedRaster& src, const Raster* conf, float constant_conf = 0.0f);

  /// Pixel bounding box of all valid pixels (empty if none).
  [[nodiscard]] PixelRect valid_bounds() const;

  /// Pixel rectangle covered by allocated tiles.
  [[nodiscard]] PixelRect allocated_bounds() const;

 private:
  [[nodiscard]] std::int32_t node(int p, int q) const;

  int level_ = 0;
  int channels_ = 3;
  TileRect bbox_{};
  std::vector<std::int32_t> nodes_;
  std::vector<std::unique_ptr<Tile>> tiles_;
};

}  // namespace prefine::pyramid
