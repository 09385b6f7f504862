#include "prefine/registration/flow.hpp"

#include <algorithm>
#include <cmath>
#include <opencv2/core.hpp>
#include <opencv2/video/tracking.hpp>
#include <stdexcept>

namespace prefine::registration {
namespace {

double valid_mean(const Raster& img, const Mask& valid) {
  double sum = 0.0;
  std::size_t n = 0;
  for (int y = 0; y < img.height(); ++y) {
    const float* a = img.row(0, y);
    const std::uint8_t* m = valid.row(y);
    for (int x = 0; x < img.width(); ++x) {
      if (!m[x]) continue;
      sum += a[x];
      ++n;
    }
  }
  return n > 0 ? sum / static_cast<double>(n) : 0.0;
}

// Quantizes with the valid-pixel mean moved to mid-gray; pixels outside
// `valid` are taken from `fallback` (shifted by its own mean).
cv::Mat to_u8(const Raster& img, const Raster& fallback, const Mask& valid) {
  const float shift_a = static_cast<float>(0.5 - valid_mean(img, valid));
  const float shift_b = static_cast<float>(0.5 - valid_mean(fallback, valid));
  cv::Mat out(img.height(), img.width(), CV_8UC1);
  for (int y = 0; y < img.height(); ++y) {
    const float* a = img.row(0, y);
    const float* b = fallback.row(0, y);
    const std::uint8_t* m = valid.row(y);
    auto* o = out.ptr<std::uint8_t>(y);
    for (int x = 0; x < img.width(); ++x) {
      const float v = m[x] ? a[x] + shift_a : b[x] + shift_b;
      o[x] = static_cast<std::uint8_t>(std::clamp(std::lround(v * 255.0f), 0L, 255L));
    }
  }
  return out;
}

}  // namespace

FlowField dense_flow(const Raster& model, const Raster& obs, const Mask& valid, const FlowConfig& cfg) {
  if (model.channels() != 1 || obs.channels() != 1) {
    throw std::invalid_argument("dense_flow expects single-channel images");
  }
  if (model.width() != obs.width() || model.height() != obs.height() || valid.width() != model.width() ||
      valid.height() != model.height()) {
    throw std::invalid_argument("dense_flow inputs differ in size");
  }
  FlowField out = make_flow(model.width(), model.height(), model.origin());
  if (model.empty() || !valid.any()) return out;

  const cv::Mat prev = to_u8(model, obs, valid);
  const cv::Mat next = to_u8(obs, model, valid);
  cv::Mat flow;
  cv::calcOpticalFlowFarneback(prev, next, flow, cfg.pyr_scale, cfg.levels, cfg.window, cfg.iterations,
                               cfg.poly_n, cfg.poly_sigma, cfg.gaussian ? cv::OPTFLOW_FARNEBACK_GAUSSIAN : 0);
  for (int y = 0; y < out.height(); ++y) {
    const auto* f = flow.ptr<cv::Vec2f>(y);
    const std::uint8_t* m = valid.row(y);
    float* dx = out.row(0, y);
    float* dy = out.row(1, y);
    for (int x = 0; x < out.width(); ++x) {
      if (!m[x]) continue;
      dx[x] = f[x][0];
      dy[x] = f[x][1];
    }
  }
  return out;
}

FlowField upscale_flow(const FlowField& flow, int levels, const PixelRect& target) {
  if (flow.channels() != 2) throw std::invalid_argument("upscale_flow expects a 2-channel field");
  if (levels < 0) throw std::invalid_argument("upscale_flow: negative level count");
  FlowField out = make_flow(target.width, target.height, {target.x0, target.y0});
  if (flow.empty()) return out;
  const double s = std::ldexp(1.0, levels);
  const float gain = static_cast<float>(s);
  const int w = flow.width(), h = flow.height();
  for (int y = 0; y < target.height; ++y) {
    const double py = std::clamp((target.y0 + y) / s - flow.origin().y, 0.0, h - 1.0);
    const int y0 = std::min(static_cast<int>(py), h - 1);
    const int y1 = std::min(y0 + 1, h - 1);
    const float fy = static_cast<float>(py - y0);
    for (int x = 0; x < target.width; ++x) {
      const double px = std::clamp((target.x0 + x) / s - flow.origin().x, 0.0, w - 1.0);
      const int x0 = std::min(static_cast<int>(px), w - 1);
      const int x1 = std::min(x0 + 1, w - 1);
      const float fx = static_cast<float>(px - x0);
      for (int c = 0; c < 2; ++c) {
        const float top = flow.at(c, x0, y0) * (1 - fx) + flow.at(c, x1, y0) * fx;
        const float bot = flow.at(c, x0, y1) * (1 - fx) + flow.at(c, x1, y1) * fx;
        out.at(c, x, y) = (top * (1 - fy) + bot * fy) * gain;
      }
    }
  }
  return out;
}

}  // namespace prefine::registration
