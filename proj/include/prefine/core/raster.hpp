#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "prefine/core/geometry.hpp"

namespace prefine {

/// 1D taps of the separable low-pass filter used by reduce/expand. Sums to 1 exactly.
inline constexpr std::array<float, 5> kKernel5{0.0625f, 0.25f, 0.375f, 0.25f, 0.0625f};

/// Single-level floating-point image: 1 or 3 channels, or 2 for flow fields.
///
/// Storage is channel-planar: each channel is a contiguous row-major plane.
/// `origin` places pixel (0,0) in the global pixel grid of the raster's level.
class Raster {
 public:
  Raster() = default;
  Raster(int width, int height, int channels, Point origin = {}, float fill = 0.0f);

  [[nodiscard]] int width() const { return width_; }
  [[nodiscard]] int height() const { return height_; }
  [[nodiscard]] int channels() const { return channels_; }
  [[nodiscard]] Point origin() const { return origin_; }
  void set_origin(Point origin) { origin_ = origin; }
  [[nodiscard]] PixelRect rect() const { return {origin_.x, origin_.y, width_, height_}; }
  [[nodiscard]] bool empty() const { return width_ == 0 || height_ == 0; }

  [[nodiscard]] std::size_t plane_size() const {
    return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
  }

  [[nodiscard]] float* plane(int c) { return data_.data() + c * plane_size(); }
  [[nodiscard]] const float* plane(int c) const { return data_.data() + c * plane_size(); }
  [[nodiscard]] float* row(int c, int y) { return plane(c) + static_cast<std::size_t>(y) * width_; }
  [[nodiscard]] const float* row(int c, int y) const {
    return plane(c) + static_cast<std::size_t>(y) * width_;
  }

  [[nodiscard]] float& at(int c, int x, int y) { return row(c, y)[x]; }
  [[nodiscard]] float at(int c, int x, int y) const { return row(c, y)[x]; }

  [[nodiscard]] std::span<float> data() { return data_; }
  [[nodiscard]] std::span<const float> data() const { return data_; }

  void fill(float v);

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  Point origin_{};
  std::vector<float> data_;
};

/// Per-pixel validity (0/1 bytes) aligned with a Raster.
class Mask {
 public:
  Mask() = default;
  Mask(int width, int height, Point origin = {}, bool value = false);

  [[nodiscard]] int width() const { return width_; }
  [[nodiscard]] int height() const { return height_; }
  [[nodiscard]] Point origin() const { return origin_; }
  void set_origin(Point origin) { origin_ = origin; }
  [[nodiscard]] PixelRect rect() const { return {origin_.x, origin_.y, width_, height_}; }

  [[nodiscard]] std::uint8_t* row(int y) { return bits_.data() + static_cast<std::size_t>(y) * width_; }
  [[nodiscard]] const std::uint8_t* row(int y) const {
    return bits_.data() + static_cast<std::size_t>(y) * width_;
  }
  [[nodiscard]] bool at(int x, int y) const { return row(y)[x] != 0; }
  void set(int x, int y, bool v) { row(y)[x] = v ? 1 : 0; }

  [[nodiscard]] std::span<std::uint8_t> bits() { return bits_; }
  [[nodiscard]] std::span<const std::uint8_t> bits() const { return bits_; }

  [[nodiscard]] std::size_t count() const;
  [[nodiscard]] bool any() const;
  void fill(bool v);

  friend bool operator==(const Mask&, const Mask&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  Point origin_{};
  std::vector<std::uint8_t> bits_;
};

/// Raster plus the mask describing which of its pixels carry data.
struct MaskedRaster {
  Raster image;
  Mask mask;
};

/// True if both objects describe the same pixel grid placement.
inline bool same_grid(const Raster& r, const Mask& m) {
  return r.width() == m.width() && r.height() == m.height() && r.origin() == m.origin();
}

inline void require_same_grid(const Raster& r, const Mask& m) {
  if (!same_grid(r, m)) throw std::invalid_argument("raster and mask grids differ");
}

/// Copies the part of `src` overlapping `dst` into `dst` (global coordinates).
void copy_overlap(const Raster& src, Raster& dst);
void copy_overlap(const Mask& src, Mask& dst);

/// Sub-window of a raster/mask in global coordinates; pixels outside the source are 0.
Raster crop(const Raster& src, const PixelRect& rect);
Mask crop(const Mask& src, const PixelRect& rect);

}  // namespace prefine
