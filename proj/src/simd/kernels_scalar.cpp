#include "prefine/simd/kernels.hpp"

#include "kernels_internal.hpp"

namespace prefine::simd {
namespace scalar {

void weighted_sum(float* out, const float* const* rows, const float* weights, int count,
                  std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    float acc = weights[0] * rows[0][i];
    for (int k = 1; k < count; ++k) acc = acc + weights[k] * rows[k][i];
    out[i] = acc;
  }
}

void multiply(float* out, const float* a, const float* b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void normalize(float* const* values, int channels, const float* den, std::uint8_t* valid,
               float min_weight, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const float d = den[i];
    const bool ok = d >= min_weight && d > 0.0f;
    valid[i] = ok ? 1 : 0;
    for (int c = 0; c < channels; ++c) values[c][i] = ok ? values[c][i] / d : 0.0f;
  }
}

void luminance(float* out, const float* r, const float* g, const float* b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = 0.299f * r[i] + 0.587f * g[i] + 0.114f * b[i];
}

void subtract_masked(float* out, const float* g, const float* e, const std::uint8_t* e_valid,
                     std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = g[i] - (e_valid[i] ? e[i] : 0.0f);
}

void add_masked(float* out, const float* l, const std::uint8_t* l_valid, const float* e,
                const std::uint8_t* e_valid, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = (l_valid[i] ? l[i] : 0.0f) + (e_valid[i] ? e[i] : 0.0f);
  }
}

void mask_and(std::uint8_t* out, const std::uint8_t* a, const std::uint8_t* b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] & b[i];
}

void mask_or(std::uint8_t* out, const std::uint8_t* a, const std::uint8_t* b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] | b[i];
}

void bilinear(float* const* out, const float* const* src, int channels, int src_stride,
              const std::int32_t* x0, const std::int32_t* y0, const float* fx, const float* fy,
              const std::int32_t* dx, const std::int32_t* dy, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t i00 = static_cast<std::size_t>(y0[i]) * src_stride + x0[i];
    const std::size_t i01 = i00 + dx[i];
    const std::size_t i10 = i00 + static_cast<std::size_t>(dy[i]) * src_stride;
    const std::size_t i11 = i10 + dx[i];
    const float wx1 = fx[i];
    const float wx0 = 1.0f - wx1;
    const float wy1 = fy[i];
    const float wy0 = 1.0f - wy1;
    for (int c = 0; c < channels; ++c) {
      const float* s = src[c];
      const float top = wx0 * s[i00] + wx1 * s[i01];
      const float bottom = wx0 * s[i10] + wx1 * s[i11];
      out[c][i] = wy0 * top + wy1 * bottom;
    }
  }
}

std::size_t merge_row(const MergeRow& r) {
  std::size_t written = 0;
  for (std::size_t i = 0; i < r.n; ++i) {
    const bool replace = r.replace_allowed[i] && r.obs_confidence[i] < r.model_confidence[i];
    const bool fill = r.fill_allowed[i] && !r.model_valid[i];
    if (replace || fill) {
      r.model[0][i] = r.obs[0][i];
      r.model[1][i] = r.obs[1][i];
      r.model[2][i] = r.obs[2][i];
      r.model_confidence[i] = r.obs_confidence[i];
      r.model_valid[i] = 1;
      ++written;
    }
  }
  return written;
}

}  // namespace scalar

const KernelTable& scalar_kernels() {
  static const KernelTable table{
      Isa::scalar,          scalar::weighted_sum, scalar::multiply,   scalar::normalize,
      scalar::luminance,    scalar::subtract_masked, scalar::add_masked, scalar::mask_and,
      scalar::mask_or,      scalar::bilinear,     scalar::merge_row,
  };
  return table;
}

}  // namespace prefine::simd
