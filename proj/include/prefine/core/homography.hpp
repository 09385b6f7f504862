#pragma once

#include <Eigen/Core>
#include <Eigen/LU>
#include <array>
#include <cmath>
#include <stdexcept>

namespace prefine {

/// Projective map from observation pixel coordinates to model level-0 coordinates.
struct Homography {
  Eigen::Matrix3d m = Eigen::Matrix3d::Identity();

  static Homography identity() { return {}; }
  static Homography translation(double tx, double ty) {
    Homography h;
    h.m(0, 2) = tx;
    h.m(1, 2) = ty;
    return h;
  }
  static Homography scale_translation(double s, double tx, double ty) {
    Homography h;
    h.m(0, 0) = s;
    h.m(1, 1) = s;
    h.m(0, 2) = tx;
    h.m(1, 2) = ty;
    return h;
  }

  [[nodiscard]] double determinant() const { return m.determinant(); }
  [[nodiscard]] bool invertible() const { return std::abs(determinant()) > 1e-12; }

  /// Scales so the bottom-right entry is 1 (when it is nonzero).
  [[nodiscard]] Homography normalized() const {
    Homography h = *this;
    if (std::abs(h.m(2, 2)) > 0.0) h.m /= h.m(2, 2);
    return h;
  }

  [[nodiscard]] Homography inverse() const {
    if (!invertible()) throw std::domain_error("homography is singular");
    return Homography{m.inverse()}.normalized();
  }

  [[nodiscard]] Eigen::Vector2d apply(const Eigen::Vector2d& p) const {
    const Eigen::Vector3d q = m * Eigen::Vector3d(p.x(), p.y(), 1.0);
    return {q.x() / q.z(), q.y() / q.z()};
  }

  /// Left-composition: result maps p -> lhs(rhs(p)).
  friend Homography operator*(const Homography& lhs, const Homography& rhs) {
    return Homography{lhs.m * rhs.m};
  }

  [[nodiscard]] std::array<double, 9> to_array() const {
    std::array<double, 9> a{};
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) a[static_cast<std::size_t>(r * 3 + c)] = m(r, c);
    return a;
  }
  static Homography from_array(const std::array<double, 9>& a) {
    Homography h;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) h.m(r, c) = a[static_cast<std::size_t>(r * 3 + c)];
    return h;
  }
};

/// Largest displacement of the corners of a w x h image between two homographies.
double corner_transfer_error(const Homography& a, const Homography& b, int width, int height);

}  // namespace prefine
