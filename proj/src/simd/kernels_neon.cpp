// Built only for AArch64 targets (see src/CMakeLists.txt).

#include <arm_neon.h>

#include "kernels_internal.hpp"

namespace prefine::simd {
namespace {

inline uint32x4_t bytes_to_mask(const std::uint8_t* p) {
  const std::uint32_t lanes[4] = {p[0] ? 0xffffffffu : 0u, p[1] ? 0xffffffffu : 0u,
                                  p[2] ? 0xffffffffu : 0u, p[3] ? 0xffffffffu : 0u};
  return vld1q_u32(lanes);
}

void weighted_sum(float* out, const float* const* rows, const float* weights, int count,
                  std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    float32x4_t acc = vmulq_n_f32(vld1q_f32(rows[0] + i), weights[0]);
    for (int k = 1; k < count; ++k) acc = vaddq_f32(acc, vmulq_n_f32(vld1q_f32(rows[k] + i), weights[k]));
    vst1q_f32(out + i, acc);
  }
  if (i < n) {
    const float* tail[16];
    for (int k = 0; k < count; ++k) tail[k] = rows[k] + i;
    scalar::weighted_sum(out + i, tail, weights, count, n - i);
  }
}

void multiply(float* out, const float* a, const float* b, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) vst1q_f32(out + i, vmulq_f32(vld1q_f32(a + i), vld1q_f32(b + i)));
  scalar::multiply(out + i, a + i, b + i, n - i);
}

void luminance(float* out, const float* r, const float* g, const float* b, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    float32x4_t acc = vmulq_n_f32(vld1q_f32(r + i), 0.299f);
    acc = vaddq_f32(acc, vmulq_n_f32(vld1q_f32(g + i), 0.587f));
    acc = vaddq_f32(acc, vmulq_n_f32(vld1q_f32(b + i), 0.114f));
    vst1q_f32(out + i, acc);
  }
  scalar::luminance(out + i, r + i, g + i, b + i, n - i);
}

void subtract_masked(float* out, const float* g, const float* e, const std::uint8_t* e_valid,
                     std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const float32x4_t ev = vreinterpretq_f32_u32(
        vandq_u32(vreinterpretq_u32_f32(vld1q_f32(e + i)), bytes_to_mask(e_valid + i)));
    vst1q_f32(out + i, vsubq_f32(vld1q_f32(g + i), ev));
  }
  scalar::subtract_masked(out + i, g + i, e + i, e_valid + i, n - i);
}

void add_masked(float* out, const float* l, const std::uint8_t* l_valid, const float* e,
                const std::uint8_t* e_valid, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const float32x4_t lv = vreinterpretq_f32_u32(
        vandq_u32(vreinterpretq_u32_f32(vld1q_f32(l + i)), bytes_to_mask(l_valid + i)));
    const float32x4_t ev = vreinterpretq_f32_u32(
        vandq_u32(vreinterpretq_u32_f32(vld1q_f32(e + i)), bytes_to_mask(e_valid + i)));
    vst1q_f32(out + i, vaddq_f32(lv, ev));
  }
  scalar::add_masked(out + i, l + i, l_valid + i, e + i, e_valid + i, n - i);
}

void mask_and(std::uint8_t* out, const std::uint8_t* a, const std::uint8_t* b, std::size_t n) {
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) vst1q_u8(out + i, vandq_u8(vld1q_u8(a + i), vld1q_u8(b + i)));
  scalar::mask_and(out + i, a + i, b + i, n - i);
}

void mask_or(std::uint8_t* out, const std::uint8_t* a, const std::uint8_t* b, std::size_t n) {
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) vst1q_u8(out + i, vorrq_u8(vld1q_u8(a + i), vld1q_u8(b + i)));
  scalar::mask_or(out + i, a + i, b + i, n - i);
}

}  // namespace

namespace detail {

// Normalization, resampling and merging have no NEON path yet; they use the
// scalar code, which keeps the table bit-compatible with the other variants.
const KernelTable* neon_table() {
  static const KernelTable table{
      Isa::neon,       weighted_sum,     multiply,         scalar::normalize,
      luminance,       subtract_masked,  add_masked,       mask_and,
      mask_or,         scalar::bilinear, scalar::merge_row,
  };
  return &table;
}

}  // namespace detail
}  // namespace prefine::simd
