#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "prefine/fusion/merge.hpp"
#include "prefine/outlier/outlier.hpp"
#include "prefine/registration/flow.hpp"
#include "prefine/registration/ransac.hpp"

namespace prefine::fusion {

struct PipelineConfig {
  registration::DetectorConfig detector;
  registration::MatchConfig match;
  registration::RansacConfig ransac;
  registration::FlowConfig flow;
  bool refine_flow = true;
  double max_flow = 8.0;            // pixels at the flow level; longer vectors are dropped
  float outlier_threshold = 10.0f;  // 1.0 for strong geometric distortions
  int open_radius = 3;
  int close_radius = 4;
  double gate_tolerance = 0.10;     // relative slack of the full-image std test
};

struct StageTimes {
  double registration = 0.0;
  double pyramids = 0.0;
  double outlier = 0.0;
  double expansion = 0.0;
  double merging = 0.0;

  [[nodiscard]] double total() const { return registration + pyramids + outlier + expansion + merging; }
  StageTimes& operator+=(const StageTimes& o);
};

struct FrameReport {
  std::string frame_id;
  bool registered = false;
  bool merged = false;
  std::string skip_reason;  // set when the frame was not registered
  std::size_t features = 0;
  std::size_t matches = 0;
  int inliers = 0;
  Homography h;
  int l_min = 0;
  int l_max = 0;
  outlier::OutlierReport outlier;
  std::map<int, std::size_t> pixels_written;
  std::map<int, std::size_t> tiles_written;
  std::size_t tiles_allocated = 0;
  std::vector<std::string> expansions;
  StageTimes times;  // milliseconds
  std::size_t payload_bytes = 0;
};

/// Intermediate products of one observation, exposed for inspection.
struct ObservationDiagnostics {
  MaskedRaster warped;       // after flow correction, on the l_min grid
  Raster error;              // per-pixel outlier error (empty if the gate failed)
  Mask accept;
  FlowField flow;            // on the l_min grid (empty when flow is off)
};

/// Model from a reference image plus its feature store.
pyramid::AdaptivePyramid initialize_model(const Raster& reference, const PipelineConfig& cfg = {});

/// Registers, checks and merges one observation. Registration failures are
/// reported, never thrown. With `known_h` (observation -> level 0) feature
/// matching and RANSAC are skipped.
FrameReport process_observation(pyramid::AdaptivePyramid& model, const Raster& image, const PipelineConfig& cfg,
                                const std::string& frame_id, const std::optional<Homography>& known_h = std::nullopt,
                                ObservationDiagnostics* diagnostics = nullptr);

}  // namespace prefine::fusion
