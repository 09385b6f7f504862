// Compiled with -mavx2 (see src/CMakeLists.txt); only called after a CPUID check.

#include <immintrin.h>

#include <bit>

#include "kernels_internal.hpp"

namespace prefine::simd {
namespace {

inline __m256 bytes_to_mask(const std::uint8_t* p) {
  const __m128i b = _mm_loadl_epi64(reinterpret_cast<const __m128i*>(p));
  const __m256i w = _mm256_cvtepu8_epi32(b);
  return _mm256_castsi256_ps(_mm256_cmpgt_epi32(w, _mm256_setzero_si256()));
}

inline void mask_to_bytes(__m256 m, std::uint8_t* p) {
  const int bits = _mm256_movemask_ps(m);
  for (int k = 0; k < 8; ++k) p[k] = static_cast<std::uint8_t>((bits >> k) & 1);
}

void weighted_sum(float* out, const float* const* rows, const float* weights, int count,
                  std::size_t n) {
  std::size_t i = 0;
  __m256 w[8];
  for (int k = 0; k < count && k < 8; ++k) w[k] = _mm256_set1_ps(weights[k]);
  if (count <= 8) {
    for (; i + 8 <= n; i += 8) {
      __m256 acc = _mm256_mul_ps(w[0], _mm256_loadu_ps(rows[0] + i));
      for (int k = 1; k < count; ++k) {
        acc = _mm256_add_ps(acc, _mm256_mul_ps(w[k], _mm256_loadu_ps(rows[k] + i)));
      }
      _mm256_storeu_ps(out + i, acc);
    }
  }
  if (i < n) {
    const float* tail[16];
    for (int k = 0; k < count; ++k) tail[k] = rows[k] + i;
    scalar::weighted_sum(out + i, tail, weights, count, n - i);
  }
}

void multiply(float* out, const float* a, const float* b, std::size_t n) {
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    _mm256_storeu_ps(out + i, _mm256_mul_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i)));
  }
  scalar::multiply(out + i, a + i, b + i, n - i);
}

void normalize(float* const* values, int channels, const float* den, std::uint8_t* valid,
               float min_weight, std::size_t n) {
  const __m256 minw = _mm256_set1_ps(min_weight);
  const __m256 zero = _mm256_setzero_ps();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 d = _mm256_loadu_ps(den + i);
    const __m256 ok = _mm256_and_ps(_mm256_cmp_ps(d, minw, _CMP_GE_OQ), _mm256_cmp_ps(d, zero, _CMP_GT_OQ));
    mask_to_bytes(ok, valid + i);
    for (int c = 0; c < channels; ++c) {
      const __m256 v = _mm256_div_ps(_mm256_loadu_ps(values[c] + i), d);
      _mm256_storeu_ps(values[c] + i, _mm256_and_ps(v, ok));
    }
  }
  if (i < n) {
    float* tail[4];
    for (int c = 0; c < channels; ++c) tail[c] = values[c] + i;
    scalar::normalize(tail, channels, den + i, valid + i, min_weight, n - i);
  }
}

void luminance(float* out, const float* r, const float* g, const float* b, std::size_t n) {
  const __m256 wr = _mm256_set1_ps(0.299f);
  const __m256 wg = _mm256_set1_ps(0.587f);
  const __m256 wb = _mm256_set1_ps(0.114f);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256 acc = _mm256_mul_ps(wr, _mm256_loadu_ps(r + i));
    acc = _mm256_add_ps(acc, _mm256_mul_ps(wg, _mm256_loadu_ps(g + i)));
    acc = _mm256_add_ps(acc, _mm256_mul_ps(wb, _mm256_loadu_ps(b + i)));
    _mm256_storeu_ps(out + i, acc);
  }
  scalar::luminance(out + i, r + i, g + i, b + i, n - i);
}

void subtract_masked(float* out, const float* g, const float* e, const std::uint8_t* e_valid,
                     std::size_t n) {
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 ev = _mm256_and_ps(_mm256_loadu_ps(e + i), bytes_to_mask(e_valid + i));
    _mm256_storeu_ps(out + i, _mm256_sub_ps(_mm256_loadu_ps(g + i), ev));
  }
  scalar::subtract_masked(out + i, g + i, e + i, e_valid + i, n - i);
}

void add_masked(float* out, const float* l, const std::uint8_t* l_valid, const float* e,
                const std::uint8_t* e_valid, std::size_t n) {
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 lv = _mm256_and_ps(_mm256_loadu_ps(l + i), bytes_to_mask(l_valid + i));
    const __m256 ev = _mm256_and_ps(_mm256_loadu_ps(e + i), bytes_to_mask(e_valid + i));
    _mm256_storeu_ps(out + i, _mm256_add_ps(lv, ev));
  }
  scalar::add_masked(out + i, l + i, l_valid + i, e + i, e_valid + i, n - i);
}

void mask_and(std::uint8_t* out, const std::uint8_t* a, const std::uint8_t* b, std::size_t n) {
  std::size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
    const __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + i), _mm256_and_si256(va, vb));
  }
  scalar::mask_and(out + i, a + i, b + i, n - i);
}

void mask_or(std::uint8_t* out, const std::uint8_t* a, const std::uint8_t* b, std::size_t n) {
  std::size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
    const __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + i), _mm256_or_si256(va, vb));
  }
  scalar::mask_or(out + i, a + i, b + i, n - i);
}

void bilinear(float* const* out, const float* const* src, int channels, int src_stride,
              const std::int32_t* x0, const std::int32_t* y0, const float* fx, const float* fy,
              const std::int32_t* dx, const std::int32_t* dy, std::size_t n) {
  const __m256i stride = _mm256_set1_epi32(src_stride);
  const __m256 one = _mm256_set1_ps(1.0f);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256i vx = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(x0 + i));
    const __m256i vy = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(y0 + i));
    const __m256i vdx = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(dx + i));
    const __m256i vdy = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(dy + i));
    const __m256i i00 = _mm256_add_epi32(_mm256_mullo_epi32(vy, stride), vx);
    const __m256i i01 = _mm256_add_epi32(i00, vdx);
    const __m256i i10 = _mm256_add_epi32(i00, _mm256_mullo_epi32(vdy, stride));
    const __m256i i11 = _mm256_add_epi32(i10, vdx);
    const __m256 wx1 = _mm256_loadu_ps(fx + i);
    const __m256 wx0 = _mm256_sub_ps(one, wx1);
    const __m256 wy1 = _mm256_loadu_ps(fy + i);
    const __m256 wy0 = _mm256_sub_ps(one, wy1);
    for (int c = 0; c < channels; ++c) {
      const float* s = src[c];
      const __m256 a = _mm256_i32gather_ps(s, i00, 4);
      const __m256 b = _mm256_i32gather_ps(s, i01, 4);
      const __m256 cc = _mm256_i32gather_ps(s, i10, 4);
      const __m256 d = _mm256_i32gather_ps(s, i11, 4);
      const __m256 top = _mm256_add_ps(_mm256_mul_ps(wx0, a), _mm256_mul_ps(wx1, b));
      const __m256 bottom = _mm256_add_ps(_mm256_mul_ps(wx0, cc), _mm256_mul_ps(wx1, d));
      _mm256_storeu_ps(out[c] + i, _mm256_add_ps(_mm256_mul_ps(wy0, top), _mm256_mul_ps(wy1, bottom)));
    }
  }
  if (i < n) {
    float* tail[4];
    for (int c = 0; c < channels; ++c) tail[c] = out[c] + i;
    scalar::bilinear(tail, src, channels, src_stride, x0 + i, y0 + i, fx + i, fy + i, dx + i,
                     dy + i, n - i);
  }
}

std::size_t merge_row(const MergeRow& r) {
  std::size_t written = 0;
  std::size_t i = 0;
  for (; i + 8 <= r.n; i += 8) {
    const __m256 replace_ok = bytes_to_mask(r.replace_allowed + i);
    const __m256 fill_ok = bytes_to_mask(r.fill_allowed + i);
    const __m256 model_valid = bytes_to_mask(r.model_valid + i);
    const __m256 c_obs = _mm256_loadu_ps(r.obs_confidence + i);
    const __m256 c_model = _mm256_loadu_ps(r.model_confidence + i);
    const __m256 better = _mm256_cmp_ps(c_obs, c_model, _CMP_LT_OQ);
    const __m256 write = _mm256_or_ps(_mm256_and_ps(replace_ok, better),
                                      _mm256_andnot_ps(model_valid, fill_ok));
    const int bits = _mm256_movemask_ps(write);
    if (bits == 0) continue;
    written += static_cast<std::size_t>(std::popcount(static_cast<unsigned>(bits)));
    for (int c = 0; c < 3; ++c) {
      const __m256 m = _mm256_loadu_ps(r.model[c] + i);
      _mm256_storeu_ps(r.model[c] + i, _mm256_blendv_ps(m, _mm256_loadu_ps(r.obs[c] + i), write));
    }
    _mm256_storeu_ps(r.model_confidence + i, _mm256_blendv_ps(c_model, c_obs, write));
    mask_to_bytes(_mm256_or_ps(model_valid, write), r.model_valid + i);
  }
  if (i < r.n) {
    MergeRow tail = r;
    for (int c = 0; c < 3; ++c) {
      tail.model[c] += i;
      tail.obs[c] += i;
    }
    tail.model_confidence += i;
    tail.model_valid += i;
    tail.obs_confidence += i;
    tail.replace_allowed += i;
    tail.fill_allowed += i;
    tail.n = r.n - i;
    written += scalar::merge_row(tail);
  }
  return written;
}

}  // namespace

namespace detail {

const KernelTable* avx2_table() {
  static const KernelTable table{
      Isa::avx2,  weighted_sum,    multiply,   normalize, luminance, subtract_masked,
      add_masked, mask_and,        mask_or,    bilinear,  merge_row,
  };
  return &table;
}

}  // namespace detail
}  // namespace prefine::simd
