#include "prefine/core/warp.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "prefine/simd/kernels.hpp"

namespace prefine {
namespace {

// Gathers one output row from source positions (sx[i], sy[i]).
class RowSampler {
 public:
  RowSampler(const Raster& src, const Mask* valid, int n)
      : src_(src), valid_(valid), x0_(n), y0_(n), dx_(n), dy_(n), fx_(n), fy_(n), ok_(n) {}

  void sample(const double* sx, const double* sy, MaskedRaster& out, int row) {
    const int n = static_cast<int>(x0_.size());
    const int w = src_.width();
    const int h = src_.height();
    for (int i = 0; i < n; ++i) {
      ok_[i] = 0;
      x0_[i] = y0_[i] = dx_[i] = dy_[i] = 0;
      fx_[i] = fy_[i] = 0.0f;
      const double x = sx[i];
      const double y = sy[i];
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      if (x < 0.0 || y < 0.0 || x > w - 1 || y > h - 1) continue;
      const int ix = static_cast<int>(std::floor(x));
      const int iy = static_cast<int>(std::floor(y));
      const float fx = static_cast<float>(x - ix);
      const float fy = static_cast<float>(y - iy);
      const int ddx = fx > 0.0f ? 1 : 0;
      const int ddy = fy > 0.0f ? 1 : 0;
      if (ix + ddx >= w || iy + ddy >= h) continue;
      if (valid_ != nullptr) {
        if (!valid_->at(ix, iy) || !valid_->at(ix + ddx, iy) || !valid_->at(ix, iy + ddy) ||
            !valid_->at(ix + ddx, iy + ddy)) {
          continue;
        }
      }
      ok_[i] = 1;
      x0_[i] = ix;
      y0_[i] = iy;
      dx_[i] = ddx;
      dy_[i] = ddy;
      fx_[i] = fx;
      fy_[i] = fy;
    }
    const int channels = src_.channels();
    const float* planes[3] = {nullptr, nullptr, nullptr};
    float* dst[3] = {nullptr, nullptr, nullptr};
    for (int c = 0; c < channels; ++c) {
      planes[c] = src_.plane(c);
      dst[c] = out.image.row(c, row);
    }
    simd::active_kernels().bilinear(dst, planes, channels, w, x0_.data(), y0_.data(), fx_.data(),
                                    fy_.data(), dx_.data(), dy_.data(), static_cast<std::size_t>(n));
    std::uint8_t* m = out.mask.row(row);
    for (int i = 0; i < n; ++i) {
      m[i] = ok_[i];
      if (!ok_[i]) {
        for (int c = 0; c < channels; ++c) dst[c][i] = 0.0f;
      }
    }
  }

 private:
  const Raster& src_;
  const Mask* valid_;
  std::vector<std::int32_t> x0_, y0_, dx_, dy_;
  std::vector<float> fx_, fy_;
  std::vector<std::uint8_t> ok_;
};

void check_source_mask(const Raster& img, const Mask* valid) {
  if (valid != nullptr && (valid->width() != img.width() || valid->height() != img.height())) {
    throw std::invalid_argument("source mask dimensions differ from the image");
  }
}

}  // namespace

FlowField make_flow(int width, int height, Point origin) { return Raster(width, height, 2, origin); }

MaskedRaster warp_homography(const Raster& img, const Homography& h, const PixelRect& target,
                             int level, const Mask* source_valid) {
  check_source_mask(img, source_valid);
  const Eigen::Matrix3d inv = h.inverse().m;
  const int channels = std::max(img.channels(), 1);
  MaskedRaster out{Raster(target.width, target.height, channels, {target.x0, target.y0}),
                   Mask(target.width, target.height, {target.x0, target.y0})};
  if (target.empty() || img.empty()) return out;

  const double s = level_scale(level);
  RowSampler sampler(img, source_valid, target.width);
  std::vector<double> sx(static_cast<std::size_t>(target.width));
  std::vector<double> sy(static_cast<std::size_t>(target.width));
  for (int ty = 0; ty < target.height; ++ty) {
    const double wy = (target.y0 + ty) * s;
    for (int tx = 0; tx < target.width; ++tx) {
      const double wx = (target.x0 + tx) * s;
      const double u = inv(0, 0) * wx + inv(0, 1) * wy + inv(0, 2);
      const double v = inv(1, 0) * wx + inv(1, 1) * wy + inv(1, 2);
      const double q = inv(2, 0) * wx + inv(2, 1) * wy + inv(2, 2);
      const bool front = q > 0.0;
      sx[static_cast<std::size_t>(tx)] = front ? u / q : -1.0;
      sy[static_cast<std::size_t>(tx)] = front ? v / q : -1.0;
    }
    sampler.sample(sx.data(), sy.data(), out, ty);
  }
  return out;
}

MaskedRaster warp_flow(const Raster& img, const FlowField& flow, const Mask* source_valid) {
  if (flow.width() != img.width() || flow.height() != img.height() || flow.channels() != 2) {
    throw std::invalid_argument("flow field must be 2-channel with the image's dimensions");
  }
  check_source_mask(img, source_valid);
  MaskedRaster out{Raster(img.width(), img.height(), std::max(img.channels(), 1), img.origin()),
                   Mask(img.width(), img.height(), img.origin())};
  if (img.empty()) return out;
  RowSampler sampler(img, source_valid, img.width());
  std::vector<double> sx(static_cast<std::size_t>(img.width()));
  std::vector<double> sy(static_cast<std::size_t>(img.width()));
  for (int y = 0; y < img.height(); ++y) {
    const float* fx = flow.row(0, y);
    const float* fy = flow.row(1, y);
    for (int x = 0; x < img.width(); ++x) {
      sx[static_cast<std::size_t>(x)] = x + static_cast<double>(fx[x]);
      sy[static_cast<std::size_t>(x)] = y + static_cast<double>(fy[x]);
    }
    sampler.sample(sx.data(), sy.data(), out, y);
  }
  return out;
}

}  // namespace prefine
