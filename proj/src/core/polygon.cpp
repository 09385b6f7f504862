#include "prefine/core/polygon.hpp"

#include <algorithm>
#include <limits>

namespace prefine {

bool contains(const Polygon& poly, const Eigen::Vector2d& p) {
  bool inside = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Eigen::Vector2d& a = poly[i];
    const Eigen::Vector2d& b = poly[j];
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      const double x = a.x() + (p.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
      if (p.x() < x) inside = !inside;
    }
  }
  return inside;
}

Polygon image_quad(const Homography& h, int width, int height) {
  return {h.apply({0.0, 0.0}), h.apply({double(width), 0.0}), h.apply({double(width), double(height)}),
          h.apply({0.0, double(height)})};
}

WorldRect bounds(const Polygon& poly) {
  if (poly.empty()) return {};
  WorldRect r{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
              -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto& p : poly) {
    r.x0 = std::min(r.x0, p.x());
    r.y0 = std::min(r.y0, p.y());
    r.x1 = std::max(r.x1, p.x());
    r.y1 = std::max(r.y1, p.y());
  }
  return r;
}

}  // namespace prefine
