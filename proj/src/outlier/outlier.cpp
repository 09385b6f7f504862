#include "prefine/outlier/outlier.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "prefine/core/color.hpp"
#include "prefine/core/morphology.hpp"

namespace prefine::outlier {
namespace {

bool model_has_level(const pyramid::AdaptivePyramid& model, int level) {
  return level >= model.min_level() && level < model.top_level();
}

void require_levels(const ObservationLevels& obs) {
  if (obs.stack == nullptr || obs.interior == nullptr) throw std::invalid_argument("observation levels not set");
}

}  // namespace

OutlierReport full_image_check(const ObservationLevels& obs, const pyramid::AdaptivePyramid& model, int level,
                               double tolerance) {
  require_levels(obs);
  OutlierReport r;
  r.checked_level = level;
  const auto lap = obs.stack->laplacian.find(level);
  const auto in = obs.interior->find(level);
  if (lap == obs.stack->laplacian.end() || in == obs.interior->end() || !model_has_level(model, level)) return r;

  const MaskedRaster& o = lap->second;
  const MaskedRaster m = model.laplacian(level).read(o.image.rect());
  const int channels = std::min(o.image.channels(), m.image.channels());
  std::vector<double> so(channels), so2(channels), sm(channels), sm2(channels);
  std::size_t n = 0;
  for (int y = 0; y < o.image.height(); ++y) {
    const std::uint8_t* a = in->second.row(y);
    const std::uint8_t* b = m.mask.row(y);
    for (int x = 0; x < o.image.width(); ++x) {
      if (!a[x] || !b[x]) continue;
      ++n;
      for (int c = 0; c < channels; ++c) {
        const double vo = o.image.at(c, x, y), vm = m.image.at(c, x, y);
        so[c] += vo;
        so2[c] += vo * vo;
        sm[c] += vm;
        sm2[c] += vm * vm;
      }
    }
  }
  r.overlap_pixels = n;
  if (n < 2) return r;
  for (int c = 0; c < channels; ++c) {
    const double mo = so[c] / n, mm = sm[c] / n;
    r.std_obs += std::sqrt(std::max(0.0, so2[c] / n - mo * mo));
    r.std_model += std::sqrt(std::max(0.0, sm2[c] / n - mm * mm));
  }
  r.std_obs /= channels;
  r.std_model /= channels;
  r.full_image_pass = r.std_obs >= (1.0 - tolerance) * r.std_model;
  return r;
}

Raster per_pixel_error(const ObservationLevels& obs, const pyramid::AdaptivePyramid& model, int first_level,
                       int end_level) {
  require_levels(obs);
  const pyramid::LaplacianStack& s = *obs.stack;
  const PixelRect base = s.base < s.top ? s.laplacian.at(s.base).image.rect() : s.top_gaussian.image.rect();
  Raster e(base.width, base.height, 1, {base.x0, base.y0});
  for (int l = std::max(first_level, s.base); l < std::min(end_level, s.top); ++l) {
    if (!model_has_level(model, l)) continue;
    const MaskedRaster& o = s.laplacian.at(l);
    const Mask& in = obs.interior->at(l);
    const PixelRect rect = o.image.rect();
    if (rect.empty()) continue;
    const MaskedRaster m = model.laplacian(l).read(rect);
    const Raster lo = gray_view(o.image);
    const Raster lm = gray_view(m.image);
    Raster el(rect.width, rect.height, 1, {rect.x0, rect.y0});
    for (int y = 0; y < rect.height; ++y) {
      const std::uint8_t* a = in.row(y);
      const std::uint8_t* b = m.mask.row(y);
      const float* vo = lo.row(0, y);
      const float* vm = lm.row(0, y);
      float* out = el.row(0, y);
      for (int x = 0; x < rect.width; ++x) {
        if (!a[x] || !b[x]) continue;
        const float den = std::max(std::min(std::abs(vo[x]), std::abs(vm[x])), kErrorEpsilon);
        out[x] = std::abs(vm[x] - vo[x]) / den;
      }
    }
    const int k = l - s.base;
    for (int y = 0; y < base.height; ++y) {
      const int ay = ((base.y0 + y) >> k) - rect.y0;
      if (ay < 0 || ay >= rect.height) continue;
      const float* src = el.row(0, ay);
      float* dst = e.row(0, y);
      for (int x = 0; x < base.width; ++x) {
        const int ax = ((base.x0 + x) >> k) - rect.x0;
        if (ax >= 0 && ax < rect.width) dst[x] += src[ax];
      }
    }
  }
  return e;
}

Mask outlier_mask(const Raster& error, float threshold, int r_open, int r_close, const Mask* always_accept) {
  if (!(threshold > 0.0f)) throw std::invalid_argument("outlier threshold must be positive");
  Mask accept(error.width(), error.height(), error.origin());
  for (int y = 0; y < error.height(); ++y) {
    const float* e = error.row(0, y);
    std::uint8_t* a = accept.row(y);
    for (int x = 0; x < error.width(); ++x) a[x] = e[x] <= threshold ? 1 : 0;
  }
  accept = morph_open_close(accept, r_open, r_close);
  if (always_accept != nullptr) {
    if (always_accept->rect() != accept.rect()) throw std::invalid_argument("outlier_mask: grids differ");
    for (std::size_t i = 0; i < accept.bits().size(); ++i) accept.bits()[i] |= always_accept->bits()[i];
  }
  return accept;
}

}  // namespace prefine::outlier
