#pragma once

#include <Eigen/Core>
#include <optional>
#include <vector>

#include "prefine/core/homography.hpp"
#include "prefine/core/raster.hpp"
#include "prefine/registration/feature.hpp"

namespace prefine::registration {

struct DetectorConfig {
  int max_features = 6000;        // strongest kept, 0 = unlimited
  int corner_levels = 3;          // octaves searched for corners
  int max_corners_per_level = 1500;
  double corner_quality = 0.01;
  double corner_min_distance = 6.0;
  double contrast_threshold = 0.03;
};

/// Scale-space blobs (difference of Gaussians) plus multi-scale corners, all
/// carrying 128-float gradient-histogram descriptors. Positions are subpixel,
/// in pixels of `gray`. Output order is deterministic (sorted by position).
FeatureSet detect_features(const Raster& gray, const DetectorConfig& cfg = {});

struct Correspondence {
  Eigen::Vector2d obs;    // observation pixels
  Eigen::Vector2d model;  // l_min^M pixels
  int obs_index = -1;
  int model_index = -1;
  float distance = 0.0f;
};

struct MatchConfig {
  double ratio = 0.8;
  double prior_gate = 64.0;  // pixels at l_min^M scale
};

/// Nearest-neighbor descriptor matches passing the ratio test. When `prior`
/// (observation -> l_min^M pixels) is given, matches farther than
/// cfg.prior_gate from their predicted position are dropped.
std::vector<Correspondence> match_features(const FeatureSet& obs, const FeatureSet& model,
                                           const std::optional<Homography>& prior, const MatchConfig& cfg = {});

}  // namespace prefine::registration
