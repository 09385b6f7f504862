#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "prefine/core/homography.hpp"
#include "prefine/registration/features.hpp"

namespace prefine::registration {

class RegistrationError : public std::runtime_error {
 public:
  enum class Kind { too_few_matches, no_consensus };
  RegistrationError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  [[nodiscard]] Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

const char* to_string(RegistrationError::Kind kind);

struct RansacConfig {
  double inlier_threshold = 3.0;  // symmetric transfer error, pixels at l_min^M scale
  double confidence = 0.999;
  int max_iterations = 5000;
  int min_inliers = 12;
  std::uint64_t seed = 0x9e3779b97f4a7c15ull;
};

struct RansacResult {
  Homography h;  // observation -> model coordinates of the correspondences
  std::vector<std::uint8_t> inliers;
  int inlier_count = 0;
  int iterations = 0;
};

/// Normalized direct linear transform through >= 4 point pairs (least squares
/// when more). Throws std::invalid_argument for fewer than 4 pairs.
Homography fit_homography(const std::vector<Eigen::Vector2d>& src, const std::vector<Eigen::Vector2d>& dst);

/// Mean of the forward and backward transfer distances of one pair.
double symmetric_transfer_error(const Homography& h, const Homography& h_inv, const Eigen::Vector2d& src,
                                const Eigen::Vector2d& dst);

/// 4-point RANSAC, then a refit over all inliers. Throws RegistrationError.
RansacResult estimate_homography_ransac(const std::vector<Correspondence>& corr, const RansacConfig& cfg = {});

}  // namespace prefine::registration
