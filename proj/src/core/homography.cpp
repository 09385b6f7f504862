#include "prefine/core/homography.hpp"

#include <algorithm>

namespace prefine {

double corner_transfer_error(const Homography& a, const Homography& b, int width, int height) {
  const double w = width - 1;
  const double h = height - 1;
  const Eigen::Vector2d corners[4] = {{0.0, 0.0}, {w, 0.0}, {w, h}, {0.0, h}};
  double worst = 0.0;
  for (const auto& c : corners) worst = std::max(worst, (a.apply(c) - b.apply(c)).norm());
  return worst;
}

}  // namespace prefine
