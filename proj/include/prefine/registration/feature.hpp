#pragma once

#include <vector>

namespace prefine::registration {

/// Keypoint with descriptor. Positions of stored model features are in
/// l_min^M pixel units; freshly detected ones are in input-image pixels.
struct Feature {
  double x = 0.0;
  double y = 0.0;
  float scale = 0.0f;
  float orientation = 0.0f;  // radians
  std::vector<float> descriptor;

  friend bool operator==(const Feature&, const Feature&) = default;
};

using FeatureSet = std::vector<Feature>;

/// Multiplies every position by `factor` (used when the finest model level changes).
inline void rescale(FeatureSet& features, double factor) {
  for (Feature& f : features) {
    f.x *= factor;
    f.y *= factor;
    f.scale = static_cast<float>(f.scale * factor);
  }
}

}  // namespace prefine::registration
