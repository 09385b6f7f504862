#include "prefine/core/morphology.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace prefine {
namespace {

std::vector<int> disk_half_widths(int radius) {
  std::vector<int> half(static_cast<std::size_t>(2 * radius + 1));
  for (int dy = -radius; dy <= radius; ++dy) {
    int w = 0;
    while ((w + 1) * (w + 1) + dy * dy <= radius * radius) ++w;
    half[static_cast<std::size_t>(dy + radius)] = w;
  }
  return half;
}

// For erosion `count_value` is false: a pixel survives iff no false pixel of
// the disk lies inside the mask. For dilation it is true: a pixel is set iff
// some true pixel does.
Mask disk_filter(const Mask& mask, int radius, bool count_value) {
  if (radius < 0) throw std::invalid_argument("structuring element radius must be >= 0");
  const int w = mask.width();
  const int h = mask.height();
  Mask out(w, h, mask.origin());
  if (w == 0 || h == 0) return out;

  // prefix[y][x] = number of pixels in row y, columns [0, x), equal to count_value.
  std::vector<int> prefix(static_cast<std::size_t>(w + 1) * h, 0);
  for (int y = 0; y < h; ++y) {
    const std::uint8_t* row = mask.row(y);
    int* p = prefix.data() + static_cast<std::size_t>(y) * (w + 1);
    for (int x = 0; x < w; ++x) p[x + 1] = p[x] + (((row[x] != 0) == count_value) ? 1 : 0);
  }
  const std::vector<int> half = disk_half_widths(radius);
  for (int y = 0; y < h; ++y) {
    std::uint8_t* dst = out.row(y);
    for (int x = 0; x < w; ++x) {
      bool hit = false;
      for (int dy = -radius; dy <= radius && !hit; ++dy) {
        const int yy = y + dy;
        if (yy < 0 || yy >= h) continue;
        const int hw = half[static_cast<std::size_t>(dy + radius)];
        const int lo = std::max(0, x - hw);
        const int hi = std::min(w, x + hw + 1);
        const int* p = prefix.data() + static_cast<std::size_t>(yy) * (w + 1);
        hit = p[hi] - p[lo] > 0;
      }
      dst[x] = (hit == count_value) ? 1 : 0;
    }
  }
  return out;
}

}  // namespace

Mask erode(const Mask& mask, int radius) { return disk_filter(mask, radius, false); }

Mask dilate(const Mask& mask, int radius) { return disk_filter(mask, radius, true); }

Mask morph_open_close(const Mask& mask, int r_open, int r_close) {
  return close(open(mask, r_open), r_close);
}

}  // namespace prefine
