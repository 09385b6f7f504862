#pragma once

#include <map>

#include "prefine/core/polygon.hpp"
#include "prefine/pyramid/adaptive_pyramid.hpp"

namespace prefine::fusion {

/// Decomposed observation ready for merging. All rasters live on the global
/// grids of their levels; level_map and accept sit on the base grid l_min.
struct ObservationPacket {
  pyramid::LaplacianStack levels;  // Laplacians [l_min, l_max), Gaussian at l_max
  MaskedRaster level_map;          // real level per base pixel (the confidence source)
  Mask accept;                     // per-pixel outlier decision
  bool replace = true;             // full-image gate passed: covered pixels may be replaced
  float fallback_level = 0.0f;     // confidence where the level map has no sample

  [[nodiscard]] int l_min() const { return levels.base; }
  [[nodiscard]] int l_max() const { return levels.top; }
};

struct MergeSummary {
  std::map<int, std::size_t> pixels_written;  // per level (top Gaussian included)
  std::map<int, std::size_t> tiles_written;
  std::size_t total_pixels = 0;
  std::size_t tiles_allocated = 0;
};

/// Pixels of each level [l_min, l_max] the model has no data for (its
/// reconstruction there is invalid), on the packet's level grids.
std::map<int, Mask> model_empty_masks(const pyramid::AdaptivePyramid& model, const ObservationPacket& packet);

/// Confidence-based replacement merge.
///
/// Laplacian levels: a pixel whose detail is interior to the accepted
/// observation replaces the model when its confidence is strictly lower
/// (only when packet.replace). Pixels over model-empty areas are filled with
/// the observation's own decomposition. The top Gaussian is only filled where
/// the model has none. Written pixels take the observation's confidence.
/// Requires l_min >= model.min_level() and l_max == model.top_level().
MergeSummary merge_observation(pyramid::AdaptivePyramid& model, const ObservationPacket& packet);

/// When `passed_gate`: removes stored features inside `quad` (level-0
/// coordinates) and appends `obs_features` (already in model feature
/// coordinates). Otherwise leaves the store unchanged.
void update_features(pyramid::AdaptivePyramid& model, const registration::FeatureSet& obs_features,
                     const Polygon& quad, bool passed_gate);

}  // namespace prefine::fusion
