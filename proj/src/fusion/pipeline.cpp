#include "prefine/fusion/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "prefine/core/color.hpp"
#include "prefine/core/pyramid_ops.hpp"
#include "prefine/core/warp.hpp"
#include "prefine/registration/level_map.hpp"

namespace prefine::fusion {
namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point& t) {
  const auto now = Clock::now();
  const double ms = std::chrono::duration<double, std::milli>(now - t).count();
  t = now;
  return ms;
}

Raster match_channels(const Raster& img, int channels) {
  if (img.channels() == channels) return img;
  if (channels == 1) return gray_view(img);
  if (img.channels() != 1 || channels != 3) throw std::invalid_argument("unsupported channel conversion");
  Raster out(img.width(), img.height(), 3, img.origin());
  for (int c = 0; c < 3; ++c) std::copy(img.plane(0), img.plane(0) + img.plane_size(), out.plane(c));
  return out;
}

Homography level_scaling(int level) {
  const double s = level_scale(level);
  return Homography::scale_translation(s, 0.0, 0.0);
}

MaskedRaster reduce_to(MaskedRaster img, int levels) {
  for (int i = 0; i < levels; ++i) img = reduce(img.image, img.mask);
  return img;
}

// Backward flow between the model and the warped observation at `flow_level`,
// resized to the observation's base grid.
FlowField flow_correction(const pyramid::AdaptivePyramid& model, const MaskedRaster& warped, int base,
                          int flow_level, const PipelineConfig& cfg) {
  const MaskedRaster obs = reduce_to(warped, flow_level - base);
  const PixelRect rect = obs.image.rect();
  if (rect.width < 2 || rect.height < 2) return {};
  const MaskedRaster ref = model.reconstruct(flow_level, rect);
  Mask valid = obs.mask;
  for (std::size_t i = 0; i < valid.bits().size(); ++i) valid.bits()[i] &= ref.mask.bits()[i];
  if (!valid.any()) return {};
  FlowField flow = registration::dense_flow(gray_view(ref.image), gray_view(obs.image), valid, cfg.flow);
  const float limit = static_cast<float>(cfg.max_flow);
  for (int y = 0; y < flow.height(); ++y) {
    float* dx = flow.row(0, y);
    float* dy = flow.row(1, y);
    for (int x = 0; x < flow.width(); ++x) {
      if (std::hypot(dx[x], dy[x]) > limit) dx[x] = dy[x] = 0.0f;
    }
  }
  return registration::upscale_flow(flow, flow_level - base, warped.image.rect());
}

// Finest model level holding data under `rect` (pixels of `base`).
int local_min_level(const pyramid::AdaptivePyramid& model, const PixelRect& rect, int base) {
  const double s = level_scale(base);
  const WorldRect region{rect.x0 * s, rect.y0 * s, rect.x1() * s, rect.y1() * s};
  for (int l = model.min_level(); l < model.top_level(); ++l) {
    const PixelRect r = world_to_level_rect(region, l);
    if (!r.empty() && model.laplacian(l).read_valid(r).any()) return l;
  }
  return model.top_level();
}

registration::FeatureSet to_model_features(registration::FeatureSet f, const Homography& h, int model_min) {
  const double inv = 1.0 / level_scale(model_min);
  for (auto& ft : f) {
    const double level = registration::level_at(h, ft.x, ft.y);
    const Eigen::Vector2d p = h.apply({ft.x, ft.y});
    ft.scale = static_cast<float>(ft.scale * std::exp2(level - model_min));
    ft.x = p.x() * inv;
    ft.y = p.y() * inv;
  }
  return f;
}

std::size_t count_and_not(const Mask& a, const Mask& b) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < a.bits().size(); ++i) n += (a.bits()[i] && !b.bits()[i]) ? 1 : 0;
  return n;
}

}  // namespace

StageTimes& StageTimes::operator+=(const StageTimes& o) {
  registration += o.registration;
  pyramids += o.pyramids;
  outlier += o.outlier;
  expansion += o.expansion;
  merging += o.merging;
  return *this;
}

pyramid::AdaptivePyramid initialize_model(const Raster& reference, const PipelineConfig& cfg) {
  pyramid::AdaptivePyramid model = pyramid::AdaptivePyramid::init_from_reference(reference);
  if (std::min(reference.width(), reference.height()) >= 32) {
    model.features() = registration::detect_features(gray_view(reference), cfg.detector);
  }
  return model;
}

FrameReport process_observation(pyramid::AdaptivePyramid& model, const Raster& image, const PipelineConfig& cfg,
                                const std::string& frame_id, const std::optional<Homography>& known_h,
                                ObservationDiagnostics* diagnostics) {
  FrameReport rep;
  rep.frame_id = frame_id;
  auto t = Clock::now();
  auto skip = [&](const std::string& why) {
    rep.skip_reason = why;
    rep.times.registration += ms_since(t);
    rep.payload_bytes = model.stats().payload_bytes;
    return rep;
  };

  Raster obs = match_channels(image, model.channels());
  obs.set_origin({});
  if (obs.width() < 2 || obs.height() < 2) return skip("image too small");

  // Registration.
  registration::FeatureSet features;
  if (std::min(obs.width(), obs.height()) >= 32) features = registration::detect_features(gray_view(obs), cfg.detector);
  rep.features = features.size();
  const int model_min = model.min_level();
  Homography h;
  if (known_h) {
    h = known_h->normalized();
  } else {
    auto estimate = [&](const std::optional<Homography>& prior) {
      const auto corr = registration::match_features(features, model.features(), prior, cfg.match);
      rep.matches = corr.size();
      const registration::RansacResult r = registration::estimate_homography_ransac(corr, cfg.ransac);
      rep.inliers = r.inlier_count;
      return (level_scaling(model_min) * r.h).normalized();
    };
    std::optional<Homography> prior;
    if (model.previous_homography()) prior = level_scaling(-model_min) * *model.previous_homography();
    try {
      try {
        h = estimate(prior);
      } catch (const registration::RegistrationError&) {
        // Retry without the tracking prior.
        if (!prior) throw;
        h = estimate(std::nullopt);
      }
    } catch (const registration::RegistrationError& e) {
      return skip(registration::to_string(e.kind()));
    }
  }
  rep.h = h;
  registration::LevelBounds bounds;
  registration::WarpedObservation warped;
  try {
    bounds = registration::level_bounds(h, obs.width(), obs.height());
    warped = registration::warp_to_level(obs, h, bounds.l_min);
  } catch (const std::domain_error& e) {
    return skip(e.what());
  }
  const int base = bounds.l_min;
  rep.registered = true;
  rep.l_min = base;
  model.set_previous_homography(h);
  MaskedRaster w = std::move(warped.image);
  if (w.image.width() < 2 || w.image.height() < 2 || !w.mask.any()) return skip("empty footprint");

  const int check_level = std::max(base, local_min_level(model, w.image.rect(), base));
  FlowField flow;
  if (cfg.refine_flow && check_level < model.top_level()) {
    flow = flow_correction(model, w, base, check_level, cfg);
    if (!flow.empty()) {
      // Pixels whose corrected sample leaves the observation keep the
      // homography-only value.
      const MaskedRaster corrected = warp_flow(w.image, flow, &w.mask);
      for (int c = 0; c < w.image.channels(); ++c) {
        float* dst = w.image.plane(c);
        const float* src = corrected.image.plane(c);
        for (std::size_t i = 0; i < w.image.plane_size(); ++i)
          if (corrected.mask.bits()[i]) dst[i] = src[i];
      }
    }
  }
  rep.times.registration = ms_since(t);

  // Observation pyramid.
  const int top = pyramid::decomposition_top(w.image.width(), w.image.height(), base, model.top_level());
  rep.l_max = top;
  ObservationPacket packet;
  packet.levels = pyramid::decompose(w.image, w.mask, top, base);
  packet.level_map = {std::move(warped.level_map), w.mask};
  packet.fallback_level = static_cast<float>(bounds.min_level);
  rep.times.pyramids = ms_since(t);

  // Outlier removal.
  const std::map<int, Mask> interior = pyramid::interior_masks(w.mask, base, top);
  const outlier::ObservationLevels levels{&packet.levels, &interior};
  rep.outlier = outlier::full_image_check(levels, model, check_level, cfg.gate_tolerance);
  Mask empty(w.mask.width(), w.mask.height(), w.mask.origin());
  {
    const Mask have = model.reconstruct(base, w.mask.rect()).mask;
    for (std::size_t i = 0; i < empty.bits().size(); ++i) empty.bits()[i] = w.mask.bits()[i] && !have.bits()[i];
  }
  Raster error;
  if (rep.outlier.full_image_pass) {
    error = outlier::per_pixel_error(levels, model, check_level, top);
    packet.accept = outlier::outlier_mask(error, cfg.outlier_threshold, cfg.open_radius, cfg.close_radius, &empty);
    const std::size_t covered = w.mask.count();
    rep.outlier.rejected_pixel_fraction =
        covered > 0 ? static_cast<double>(count_and_not(w.mask, packet.accept)) / covered : 0.0;
  } else {
    packet.accept = empty;
  }
  packet.replace = rep.outlier.full_image_pass;
  rep.times.outlier = ms_since(t);

  const bool writes = rep.outlier.full_image_pass || empty.any();
  if (writes) {
    // Model expansion.
    if (top > model.top_level()) {
      model.expand_up(top);
      rep.expansions.push_back("up:" + std::to_string(top));
    }
    if (base < model.min_level()) {
      model.expand_down(base);
      rep.expansions.push_back("down:" + std::to_string(base));
    }
    rep.times.expansion = ms_since(t);

    // Merging.
    const MergeSummary s = merge_observation(model, packet);
    rep.pixels_written = s.pixels_written;
    rep.tiles_written = s.tiles_written;
    rep.tiles_allocated = s.tiles_allocated;
    rep.merged = s.total_pixels > 0;
    if (s.tiles_allocated > 0) rep.expansions.push_back("lateral");
    if (rep.merged) {
      const PixelRect r = w.image.rect();
      const double sc = level_scale(base);
      model.include_data_bounds({r.x0 * sc, r.y0 * sc, r.x1() * sc, r.y1() * sc});
    }
    update_features(model, to_model_features(std::move(features), h, model.min_level()),
                    image_quad(h, obs.width(), obs.height()), rep.outlier.full_image_pass);
    rep.times.merging = ms_since(t);
  }

  rep.payload_bytes = model.stats().payload_bytes;
  if (diagnostics != nullptr) {
    diagnostics->warped = std::move(w);
    diagnostics->error = std::move(error);
    diagnostics->accept = packet.accept;
    diagnostics->flow = std::move(flow);
  }
  return rep;
}

}  // namespace prefine::fusion
