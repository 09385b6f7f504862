#pragma once

#include <map>
#include <optional>

#include "prefine/core/homography.hpp"
#include "prefine/core/polygon.hpp"
#include "prefine/pyramid/decompose.hpp"
#include "prefine/pyramid/tile.hpp"
#include "prefine/registration/feature.hpp"

namespace prefine::pyramid {

struct PyramidStats {
  int min_level = 0;
  int top_level = 0;
  std::map<int, std::size_t> laplacian_tiles;  // allocated tiles per Laplacian level
  std::size_t top_tiles = 0;
  std::size_t total_tiles = 0;
  std::size_t payload_bytes = 0;
  std::size_t node_array_bytes = 0;

  friend bool operator==(const PyramidStats&, const PyramidStats&) = default;
};

/// The model M: sparse Laplacian levels [min_level, top_level) and the Gaussian
/// at top_level, each a LevelGrid of 512x512 tiles.
class AdaptivePyramid {
 public:
  AdaptivePyramid() = default;
  AdaptivePyramid(int channels, int min_level, int top_level);

  AdaptivePyramid(AdaptivePyramid&&) noexcept = default;
  AdaptivePyramid& operator=(AdaptivePyramid&&) noexcept = default;

  /// Standard Laplacian pyramid of the reference with level 0 as finest level,
  /// confidence 0 at every stored pixel. Throws std::invalid_argument for
  /// images smaller than 16x16.
  static AdaptivePyramid init_from_reference(const Raster& img);

  [[nodiscard]] int channels() const { return channels_; }
  [[nodiscard]] int min_level() const { return min_level_; }
  [[nodiscard]] int top_level() const { return top_level_; }

  [[nodiscard]] LevelGrid& laplacian(int level);
  [[nodiscard]] const LevelGrid& laplacian(int level) const;
  [[nodiscard]] LevelGrid& top_gaussian() { return top_; }
  [[nodiscard]] const LevelGrid& top_gaussian() const { return top_; }
  /// Laplacian grid for level < top_level, top Gaussian for level == top_level.
  [[nodiscard]] LevelGrid& grid(int level);
  [[nodiscard]] const LevelGrid& grid(int level) const;

  /// Grows the node box of `level` (Laplacian or top) without allocating tiles.
  void expand_lateral(int level, const TileRect& needed);

  /// Decomposes the top Gaussian further so the new top sits at `new_top`.
  void expand_up(int new_top);

  /// Registers empty finer levels down to `new_min` and rescales the stored
  /// feature positions by 2^(min_level - new_min).
  void expand_down(int new_min);

  /// Gaussian at `level` over `rect` (pixels of that level), rebuilt top-down.
  /// Levels below min_level are plain upsampling. Absent detail counts as 0.
  [[nodiscard]] MaskedRaster reconstruct(int level, const PixelRect& rect) const;

  /// reconstruct() over the level pixels whose sample positions fall in
  /// `region`. Throws std::runtime_error when no pixel of the result has data.
  [[nodiscard]] MaskedRaster flatten(const WorldRect& region, int level) const;
  /// Same over data_bounds().
  [[nodiscard]] MaskedRaster flatten(int level) const { return flatten(data_bounds_, level); }

  [[nodiscard]] PyramidStats stats() const;

  [[nodiscard]] const Polygon& reference_region() const { return reference_region_; }
  void set_reference_region(Polygon p) { reference_region_ = std::move(p); }

  /// Level-0 bounding box of everything written so far.
  [[nodiscard]] const WorldRect& data_bounds() const { return data_bounds_; }
  void include_data_bounds(const WorldRect& r) { data_bounds_ = bounding_union(data_bounds_, r); }

  [[nodiscard]] registration::FeatureSet& features() { return features_; }
  [[nodiscard]] const registration::FeatureSet& features() const { return features_; }

  /// Homography of the last registered observation (tracking prior).
  [[nodiscard]] const std::optional<Homography>& previous_homography() const { return h_prev_; }
  void set_previous_homography(std::optional<Homography> h) { h_prev_ = std::move(h); }

  [[nodiscard]] std::size_t tile_count() const;

 private:
  int channels_ = 3;
  int min_level_ = 0;
  int top_level_ = 0;
  std::map<int, LevelGrid> laplacian_;
  LevelGrid top_;
  Polygon reference_region_;
  WorldRect data_bounds_{};
  registration::FeatureSet features_;
  std::optional<Homography> h_prev_;
};

}  // namespace prefine::pyramid
