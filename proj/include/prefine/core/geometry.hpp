#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace prefine {

/// Integer pixel position in the global grid of one pyramid level.
struct Point {
  int x = 0;
  int y = 0;
  friend bool operator==(const Point&, const Point&) = default;
};

/// Half-open pixel rectangle [x0, x0+width) x [y0, y0+height) at one level.
struct PixelRect {
  int x0 = 0;
  int y0 = 0;
  int width = 0;
  int height = 0;

  [[nodiscard]] int x1() const { return x0 + width; }
  [[nodiscard]] int y1() const { return y0 + height; }
  [[nodiscard]] bool empty() const { return width <= 0 || height <= 0; }
  [[nodiscard]] std::int64_t area() const {
    return empty() ? 0 : static_cast<std::int64_t>(width) * height;
  }
  [[nodiscard]] bool contains(int x, int y) const {
    return x >= x0 && x < x1() && y >= y0 && y < y1();
  }

  static PixelRect from_bounds(int x0, int y0, int x1, int y1) {
    return {x0, y0, std::max(0, x1 - x0), std::max(0, y1 - y0)};
  }

  friend bool operator==(const PixelRect&, const PixelRect&) = default;
};

inline PixelRect intersect(const PixelRect& a, const PixelRect& b) {
  return PixelRect::from_bounds(std::max(a.x0, b.x0), std::max(a.y0, b.y0),
                                std::min(a.x1(), b.x1()), std::min(a.y1(), b.y1()));
}

inline PixelRect bounding_union(const PixelRect& a, const PixelRect& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  return PixelRect::from_bounds(std::min(a.x0, b.x0), std::min(a.y0, b.y0),
                                std::max(a.x1(), b.x1()), std::max(a.y1(), b.y1()));
}

/// Half-open rectangle in reference level-0 coordinates.
struct WorldRect {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;

  [[nodiscard]] bool empty() const { return !(x1 > x0 && y1 > y0); }
  friend bool operator==(const WorldRect&, const WorldRect&) = default;
};

inline WorldRect bounding_union(const WorldRect& a, const WorldRect& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  return {std::min(a.x0, b.x0), std::min(a.y0, b.y0), std::max(a.x1, b.x1),
          std::max(a.y1, b.y1)};
}

constexpr int floor_div(int a, int b) {
  const int q = a / b;
  return (a % b != 0 && ((a < 0) != (b < 0))) ? q - 1 : q;
}

constexpr int ceil_div(int a, int b) { return -floor_div(-a, b); }

/// floor(a / 2^k) for any sign of a (arithmetic shift is well defined in C++20).
constexpr int shift_down(int a, int k) { return a >> k; }

/// Scale factor 2^level as a double; level may be negative.
inline double level_scale(int level) {
  double s = 1.0;
  if (level >= 0) {
    for (int i = 0; i < level; ++i) s *= 2.0;
  } else {
    for (int i = 0; i < -level; ++i) s *= 0.5;
  }
  return s;
}

/// Pixel rect at `level` whose sample positions (i * 2^level) fall inside `region`.
inline PixelRect world_to_level_rect(const WorldRect& region, int level) {
  const double s = level_scale(level);
  const auto lo_x = static_cast<int>(std::ceil(region.x0 / s));
  const auto lo_y = static_cast<int>(std::ceil(region.y0 / s));
  const auto hi_x = static_cast<int>(std::ceil(region.x1 / s));
  const auto hi_y = static_cast<int>(std::ceil(region.y1 / s));
  return PixelRect::from_bounds(lo_x, lo_y, hi_x, hi_y);
}

}  // namespace prefine
