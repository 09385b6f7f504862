#include "prefine/core/raster.hpp"

#include <algorithm>
#include <cstring>
#include <numeric>

namespace prefine {

Raster::Raster(int width, int height, int channels, Point origin, float fill)
    : width_(width), height_(height), channels_(channels), origin_(origin) {
  if (width < 0 || height < 0) throw std::invalid_argument("negative raster size");
  if (channels != 1 && channels != 2 && channels != 3) {
    throw std::invalid_argument("raster must have 1, 2 or 3 channels");
  }
  data_.assign(plane_size() * static_cast<std::size_t>(channels), fill);
}

void Raster::fill(float v) { std::fill(data_.begin(), data_.end(), v); }

Mask::Mask(int width, int height, Point origin, bool value)
    : width_(width), height_(height), origin_(origin) {
  if (width < 0 || height < 0) throw std::invalid_argument("negative mask size");
  bits_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height),
               value ? 1 : 0);
}

std::size_t Mask::count() const {
  return static_cast<std::size_t>(std::count_if(bits_.begin(), bits_.end(),
                                                [](std::uint8_t b) { return b != 0; }));
}

bool Mask::any() const {
  return std::any_of(bits_.begin(), bits_.end(), [](std::uint8_t b) { return b != 0; });
}

void Mask::fill(bool v) { std::fill(bits_.begin(), bits_.end(), v ? 1 : 0); }

void copy_overlap(const Raster& src, Raster& dst) {
  if (src.channels() != dst.channels()) throw std::invalid_argument("channel count differs");
  const PixelRect r = intersect(src.rect(), dst.rect());
  if (r.empty()) return;
  for (int c = 0; c < src.channels(); ++c) {
    for (int y = r.y0; y < r.y1(); ++y) {
      const float* s = src.row(c, y - src.origin().y) + (r.x0 - src.origin().x);
      float* d = dst.row(c, y - dst.origin().y) + (r.x0 - dst.origin().x);
      std::memcpy(d, s, sizeof(float) * static_cast<std::size_t>(r.width));
    }
  }
}

void copy_overlap(const Mask& src, Mask& dst) {
  const PixelRect r = intersect(src.rect(), dst.rect());
  if (r.empty()) return;
  for (int y = r.y0; y < r.y1(); ++y) {
    const std::uint8_t* s = src.row(y - src.origin().y) + (r.x0 - src.origin().x);
    std::uint8_t* d = dst.row(y - dst.origin().y) + (r.x0 - dst.origin().x);
    std::memcpy(d, s, static_cast<std::size_t>(r.width));
  }
}

Raster crop(const Raster& src, const PixelRect& rect) {
  Raster out(rect.width, rect.height, src.channels(), {rect.x0, rect.y0});
  copy_overlap(src, out);
  return out;
}

Mask crop(const Mask& src, const PixelRect& rect) {
  Mask out(rect.width, rect.height, {rect.x0, rect.y0});
  copy_overlap(src, out);
  return out;
}

}  // namespace prefine
