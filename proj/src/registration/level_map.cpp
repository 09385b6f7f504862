#include "prefine/registration/level_map.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "prefine/core/warp.hpp"

namespace prefine::registration {
namespace {

constexpr double kSnap = 1.0 / 16.0;
constexpr std::int64_t kMaxWarpPixels = std::int64_t{1} << 28;

double snap(double level) {
  const double r = std::round(level);
  return std::abs(level - r) <= kSnap ? r : level;
}

}  // namespace

double level_at(const Homography& h, double x, double y) {
  const double w = h.m(2, 0) * x + h.m(2, 1) * y + h.m(2, 2);
  const double det = std::abs(h.m.determinant());
  return 0.5 * std::log2(det / std::abs(w * w * w));
}

LevelBounds level_bounds(const Homography& h, int width, int height) {
  if (!h.invertible()) throw std::domain_error("level_bounds: singular homography");
  const double xs[2] = {0.0, std::max(0, width - 1) * 1.0};
  const double ys[2] = {0.0, std::max(0, height - 1) * 1.0};
  LevelBounds b;
  b.min_level = std::numeric_limits<double>::infinity();
  b.max_level = -std::numeric_limits<double>::infinity();
  for (double x : xs) {
    for (double y : ys) {
      const double l = level_at(h, x, y);
      b.min_level = std::min(b.min_level, l);
      b.max_level = std::max(b.max_level, l);
    }
  }
  if (!std::isfinite(b.min_level) || !std::isfinite(b.max_level)) {
    throw std::domain_error("level_bounds: observation crosses the horizon of the homography");
  }
  b.l_min = static_cast<int>(std::floor(snap(b.min_level)));
  b.l_max_hint = static_cast<int>(std::ceil(snap(b.max_level)));
  return b;
}

PixelRect footprint_rect(const Homography& h, int width, int height, int level) {
  const double s = level_scale(level);
  double x0 = INFINITY, y0 = INFINITY, x1 = -INFINITY, y1 = -INFINITY;
  for (double x : {0.0, width - 1.0}) {
    for (double y : {0.0, height - 1.0}) {
      const Eigen::Vector2d p = h.apply({x, y});
      x0 = std::min(x0, p.x());
      y0 = std::min(y0, p.y());
      x1 = std::max(x1, p.x());
      y1 = std::max(y1, p.y());
    }
  }
  if (!std::isfinite(x0) || !std::isfinite(y0) || !std::isfinite(x1) || !std::isfinite(y1)) {
    throw std::domain_error("footprint is unbounded");
  }
  constexpr double kEps = 1e-9;
  const double lx = std::ceil(x0 / s - kEps), ly = std::ceil(y0 / s - kEps);
  const double hx = std::floor(x1 / s + kEps) + 1.0, hy = std::floor(y1 / s + kEps) + 1.0;
  if ((hx - lx) * (hy - ly) > static_cast<double>(kMaxWarpPixels) || std::abs(lx) > 1e9 || std::abs(ly) > 1e9) {
    throw std::domain_error("footprint too large to warp");
  }
  return PixelRect::from_bounds(static_cast<int>(lx), static_cast<int>(ly), static_cast<int>(hx),
                                static_cast<int>(hy));
}

WarpedObservation warp_to_level(const Raster& obs, const Homography& h, int level) {
  const PixelRect rect = footprint_rect(h, obs.width(), obs.height(), level);
  WarpedObservation out;
  out.level = level;
  out.image = warp_homography(obs, h, rect, level);
  out.level_map = Raster(rect.width, rect.height, 1, {rect.x0, rect.y0});
  const Eigen::Matrix3d inv = h.inverse().m;
  const double s = level_scale(level);
  for (int y = 0; y < rect.height; ++y) {
    float* row = out.level_map.row(0, y);
    const std::uint8_t* m = out.image.mask.row(y);
    for (int x = 0; x < rect.width; ++x) {
      if (!m[x]) continue;
      const Eigen::Vector3d q = inv * Eigen::Vector3d((rect.x0 + x) * s, (rect.y0 + y) * s, 1.0);
      row[x] = static_cast<float>(snap(level_at(h, q.x() / q.z(), q.y() / q.z())));
    }
  }
  return out;
}

}  // namespace prefine::registration
