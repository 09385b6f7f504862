#pragma once

#include <Eigen/Core>
#include <vector>

#include "prefine/core/geometry.hpp"
#include "prefine/core/homography.hpp"

namespace prefine {

/// Simple polygon in level-0 coordinates, vertices in order.
using Polygon = std::vector<Eigen::Vector2d>;

/// Even-odd rule; points exactly on an edge may land on either side.
bool contains(const Polygon& poly, const Eigen::Vector2d& p);

/// Corners (0,0), (w,0), (w,h), (0,h) of an image mapped through `h`.
Polygon image_quad(const Homography& h, int width, int height);

WorldRect bounds(const Polygon& poly);

}  // namespace prefine
