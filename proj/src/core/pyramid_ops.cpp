#include "prefine/core/pyramid_ops.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "prefine/simd/kernels.hpp"

namespace prefine {
namespace {

// Expand taps per output phase, listed from the lower coarse index upward.
constexpr float kEvenTaps[3] = {0.125f, 0.75f, 0.125f};
constexpr float kOddTaps[2] = {0.5f, 0.5f};

std::vector<float> mask_as_float(const Mask& mask) {
  std::vector<float> out(mask.bits().size());
  std::transform(mask.bits().begin(), mask.bits().end(), out.begin(),
                 [](std::uint8_t b) { return b ? 1.0f : 0.0f; });
  return out;
}

// Shared body of reduce() and reduce_mask(). When `img` is null only the
// validity is computed.
MaskedRaster reduce_impl(const Raster* img, const Mask& mask, float min_weight) {
  const auto& k = simd::active_kernels();
  const PixelRect in = mask.rect();
  const PixelRect out_rect = reduce_rect(in);
  const int channels = img ? img->channels() : 0;
  MaskedRaster out{img ? Raster(out_rect.width, out_rect.height, channels, {out_rect.x0, out_rect.y0})
                       : Raster(),
                   Mask(out_rect.width, out_rect.height, {out_rect.x0, out_rect.y0})};
  if (out_rect.empty()) return out;

  const int w = in.width;
  const int h = in.height;
  const std::vector<float> m = mask_as_float(mask);
  std::vector<float> weighted;  // mask * value, channel-planar
  if (img) {
    weighted.resize(static_cast<std::size_t>(w) * h * channels);
    for (int c = 0; c < channels; ++c) {
      k.multiply(weighted.data() + static_cast<std::size_t>(c) * w * h, img->plane(c), m.data(),
                 static_cast<std::size_t>(w) * h);
    }
  }

  const std::vector<float> zero_row(static_cast<std::size_t>(w), 0.0f);
  const std::size_t padded = static_cast<std::size_t>(w) + 4;
  // Vertical results padded by two zeros on each side for the horizontal pass.
  std::vector<std::vector<float>> vnum(static_cast<std::size_t>(channels), std::vector<float>(padded, 0.0f));
  std::vector<float> vden(padded, 0.0f);
  std::vector<float> hfull(static_cast<std::size_t>(w));
  std::vector<std::vector<float>> out_num(static_cast<std::size_t>(channels),
                                          std::vector<float>(static_cast<std::size_t>(out_rect.width)));
  std::vector<float> out_den(static_cast<std::size_t>(out_rect.width));

  for (int oy = 0; oy < out_rect.height; ++oy) {
    const int fine_y = 2 * (out_rect.y0 + oy) - in.y0;
    const float* rows[5];
    for (int t = 0; t < 5; ++t) {
      const int ry = fine_y - 2 + t;
      rows[t] = (ry >= 0 && ry < h) ? m.data() + static_cast<std::size_t>(ry) * w : zero_row.data();
    }
    k.weighted_sum(vden.data() + 2, rows, kKernel5.data(), 5, static_cast<std::size_t>(w));
    for (int c = 0; c < channels; ++c) {
      const float* base = weighted.data() + static_cast<std::size_t>(c) * w * h;
      for (int t = 0; t < 5; ++t) {
        const int ry = fine_y - 2 + t;
        rows[t] = (ry >= 0 && ry < h) ? base + static_cast<std::size_t>(ry) * w : zero_row.data();
      }
      k.weighted_sum(vnum[static_cast<std::size_t>(c)].data() + 2, rows, kKernel5.data(), 5,
                     static_cast<std::size_t>(w));
    }

    // Horizontal pass at full resolution, then keep globally even columns.
    auto horizontal = [&](const std::vector<float>& src, std::vector<float>& dst) {
      const float* shifted[5] = {src.data(), src.data() + 1, src.data() + 2, src.data() + 3,
                                 src.data() + 4};
      k.weighted_sum(hfull.data(), shifted, kKernel5.data(), 5, static_cast<std::size_t>(w));
      for (int ox = 0; ox < out_rect.width; ++ox) {
        dst[static_cast<std::size_t>(ox)] = hfull[static_cast<std::size_t>(2 * (out_rect.x0 + ox) - in.x0)];
      }
    };
    horizontal(vden, out_den);
    float* values[3] = {nullptr, nullptr, nullptr};
    for (int c = 0; c < channels; ++c) {
      horizontal(vnum[static_cast<std::size_t>(c)], out_num[static_cast<std::size_t>(c)]);
      values[c] = out_num[static_cast<std::size_t>(c)].data();
    }
    std::uint8_t* valid = out.mask.row(oy);
    k.normalize(values, channels, out_den.data(), valid, min_weight,
                static_cast<std::size_t>(out_rect.width));
    for (int c = 0; c < channels; ++c) {
      std::copy(out_num[static_cast<std::size_t>(c)].begin(), out_num[static_cast<std::size_t>(c)].end(),
                out.image.row(c, oy));
    }
  }
  return out;
}

struct Taps {
  int first;  // lowest coarse index
  int count;
  const float* weights;
};

Taps expand_taps(int fine) {
  if ((fine & 1) == 0) return {fine / 2 - 1, 3, kEvenTaps};
  return {(fine - 1) / 2, 2, kOddTaps};
}

}  // namespace

PixelRect reduce_rect(const PixelRect& fine) {
  if (fine.empty()) return {ceil_div(fine.x0, 2), ceil_div(fine.y0, 2), 0, 0};
  return PixelRect::from_bounds(ceil_div(fine.x0, 2), ceil_div(fine.y0, 2),
                                floor_div(fine.x1() - 1, 2) + 1, floor_div(fine.y1() - 1, 2) + 1);
}

PixelRect expand_source_rect(const PixelRect& fine) {
  if (fine.empty()) return {};
  // Even x touches x/2-1 .. x/2+1, odd x touches (x-1)/2 .. (x+1)/2.
  return PixelRect::from_bounds(floor_div(fine.x0 - 1, 2), floor_div(fine.y0 - 1, 2),
                                floor_div(fine.x1() + 1, 2) + 1, floor_div(fine.y1() + 1, 2) + 1);
}

MaskedRaster reduce(const Raster& img, const Mask& mask) {
  require_same_grid(img, mask);
  return reduce_impl(&img, mask, 0.5f);
}

Mask reduce_mask(const Mask& mask, float min_weight) {
  return std::move(reduce_impl(nullptr, mask, min_weight).mask);
}

namespace {

MaskedRaster expand_impl(const Raster& coarse, const Mask& coarse_mask, const PixelRect& fine_rect,
                         float min_weight, Mask* full_support) {
  require_same_grid(coarse, coarse_mask);
  const auto& k = simd::active_kernels();
  const int channels = coarse.channels();
  MaskedRaster out{Raster(fine_rect.width, fine_rect.height, channels, {fine_rect.x0, fine_rect.y0}),
                   Mask(fine_rect.width, fine_rect.height, {fine_rect.x0, fine_rect.y0})};
  if (fine_rect.empty()) return out;

  const PixelRect cr = coarse.rect();
  const int cw = cr.width;
  const int ch = cr.height;
  const std::vector<float> m = mask_as_float(coarse_mask);
  std::vector<float> weighted(static_cast<std::size_t>(cw) * ch * channels);
  for (int c = 0; c < channels; ++c) {
    k.multiply(weighted.data() + static_cast<std::size_t>(c) * cw * ch, coarse.plane(c), m.data(),
               static_cast<std::size_t>(cw) * ch);
  }

  const std::vector<float> zero_row(static_cast<std::size_t>(std::max(cw, 1)), 0.0f);
  // Vertical results padded by two zeros each side: P[t + 2] = coarse column t.
  const std::size_t padded = static_cast<std::size_t>(cw) + 4;
  std::vector<float> vden(padded, 0.0f);
  std::vector<std::vector<float>> vnum(static_cast<std::size_t>(channels), std::vector<float>(padded, 0.0f));
  // even_out[t] centers on coarse column t - 1; odd_out[t] sits between t - 1 and t.
  const std::size_t phase_len = static_cast<std::size_t>(cw) + 2;
  std::vector<float> even_out(phase_len);
  std::vector<float> odd_out(phase_len);
  std::vector<float> row_den(static_cast<std::size_t>(fine_rect.width));
  std::vector<std::vector<float>> row_num(static_cast<std::size_t>(channels),
                                          std::vector<float>(static_cast<std::size_t>(fine_rect.width)));

  auto horizontal = [&](const std::vector<float>& src, std::vector<float>& dst) {
    const float* e_rows[3] = {src.data(), src.data() + 1, src.data() + 2};
    k.weighted_sum(even_out.data(), e_rows, kEvenTaps, 3, phase_len);
    const float* o_rows[2] = {src.data() + 1, src.data() + 2};
    k.weighted_sum(odd_out.data(), o_rows, kOddTaps, 2, phase_len);
    for (int fx = 0; fx < fine_rect.width; ++fx) {
      const int x = fine_rect.x0 + fx;
      int t;
      const std::vector<float>* phase;
      if ((x & 1) == 0) {
        t = x / 2 - cr.x0 + 1;
        phase = &even_out;
      } else {
        t = (x - 1) / 2 - cr.x0 + 1;
        phase = &odd_out;
      }
      dst[static_cast<std::size_t>(fx)] =
          (t >= 0 && t < static_cast<int>(phase_len)) ? (*phase)[static_cast<std::size_t>(t)] : 0.0f;
    }
  };

  for (int fy = 0; fy < fine_rect.height; ++fy) {
    const Taps taps = expand_taps(fine_rect.y0 + fy);
    const float* rows[3];
    for (int t = 0; t < taps.count; ++t) {
      const int ry = taps.first + t - cr.y0;
      rows[t] = (ry >= 0 && ry < ch) ? m.data() + static_cast<std::size_t>(ry) * cw : zero_row.data();
    }
    if (cw > 0) k.weighted_sum(vden.data() + 2, rows, taps.weights, taps.count, static_cast<std::size_t>(cw));
    for (int c = 0; c < channels; ++c) {
      const float* base = weighted.data() + static_cast<std::size_t>(c) * cw * ch;
      for (int t = 0; t < taps.count; ++t) {
        const int ry = taps.first + t - cr.y0;
        rows[t] = (ry >= 0 && ry < ch) ? base + static_cast<std::size_t>(ry) * cw : zero_row.data();
      }
      if (cw > 0) {
        k.weighted_sum(vnum[static_cast<std::size_t>(c)].data() + 2, rows, taps.weights, taps.count,
                       static_cast<std::size_t>(cw));
      }
    }
    horizontal(vden, row_den);
    float* values[3] = {nullptr, nullptr, nullptr};
    for (int c = 0; c < channels; ++c) {
      horizontal(vnum[static_cast<std::size_t>(c)], row_num[static_cast<std::size_t>(c)]);
      values[c] = row_num[static_cast<std::size_t>(c)].data();
    }
    if (full_support != nullptr) {
      std::uint8_t* fs = full_support->row(fy);
      for (int fx = 0; fx < fine_rect.width; ++fx) fs[fx] = row_den[static_cast<std::size_t>(fx)] >= 1.0f ? 1 : 0;
    }
    k.normalize(values, channels, row_den.data(), out.mask.row(fy), min_weight,
                static_cast<std::size_t>(fine_rect.width));
    for (int c = 0; c < channels; ++c) {
      std::copy(row_num[static_cast<std::size_t>(c)].begin(), row_num[static_cast<std::size_t>(c)].end(),
                out.image.row(c, fy));
    }
  }
  return out;
}

}  // namespace

MaskedRaster expand_to(const Raster& coarse, const Mask& coarse_mask, const PixelRect& fine_rect,
                       float min_weight) {
  return expand_impl(coarse, coarse_mask, fine_rect, min_weight, nullptr);
}

MaskedRaster expand_to(const Raster& coarse, const Mask& coarse_mask, const PixelRect& fine_rect,
                       Mask& full_support) {
  full_support = Mask(fine_rect.width, fine_rect.height, {fine_rect.x0, fine_rect.y0});
  return expand_impl(coarse, coarse_mask, fine_rect, 0.0f, &full_support);
}

Raster expand(const Raster& img, int target_w, int target_h) {
  auto allowed = [](int dim, int target) { return target == 2 * dim - 1 || target == 2 * dim; };
  if (!allowed(img.width(), target_w) || !allowed(img.height(), target_h)) {
    throw std::invalid_argument("expand target must be 2*dim-1 or 2*dim per axis");
  }
  Raster src = img;
  src.set_origin({});
  const Mask full(src.width(), src.height(), {}, true);
  MaskedRaster out = expand_to(src, full, {0, 0, target_w, target_h});
  out.image.set_origin({2 * img.origin().x, 2 * img.origin().y});
  return std::move(out.image);
}

Mask expand_support(const Mask& coarse, const PixelRect& fine_rect) {
  Mask out(fine_rect.width, fine_rect.height, {fine_rect.x0, fine_rect.y0});
  const PixelRect cr = coarse.rect();
  auto coarse_at = [&](int x, int y) {
    return cr.contains(x, y) && coarse.at(x - cr.x0, y - cr.y0);
  };
  for (int fy = 0; fy < fine_rect.height; ++fy) {
    const Taps ty = expand_taps(fine_rect.y0 + fy);
    std::uint8_t* dst = out.row(fy);
    for (int fx = 0; fx < fine_rect.width; ++fx) {
      const Taps tx = expand_taps(fine_rect.x0 + fx);
      bool all = true;
      for (int j = 0; j < ty.count && all; ++j) {
        for (int i = 0; i < tx.count && all; ++i) all = coarse_at(tx.first + i, ty.first + j);
      }
      dst[fx] = all ? 1 : 0;
    }
  }
  return out;
}

}  // namespace prefine
