#pragma once

#include "prefine/simd/kernels.hpp"

// Scalar entry points, shared by the vector variants for their tails.
namespace prefine::simd::scalar {

void weighted_sum(float* out, const float* const* rows, const float* weights, int count,
                  std::size_t n);
void multiply(float* out, const float* a, const float* b, std::size_t n);
void normalize(float* const* values, int channels, const float* den, std::uint8_t* valid,
               float min_weight, std::size_t n);
void luminance(float* out, const float* r, const float* g, const float* b, std::size_t n);
void subtract_masked(float* out, const float* g, const float* e, const std::uint8_t* e_valid,
                     std::size_t n);
void add_masked(float* out, const float* l, const std::uint8_t* l_valid, const float* e,
                const std::uint8_t* e_valid, std::size_t n);
void mask_and(std::uint8_t* out, const std::uint8_t* a, const std::uint8_t* b, std::size_t n);
void mask_or(std::uint8_t* out, const std::uint8_t* a, const std::uint8_t* b, std::size_t n);
void bilinear(float* const* out, const float* const* src, int channels, int src_stride,
              const std::int32_t* x0, const std::int32_t* y0, const float* fx, const float* fy,
              const std::int32_t* dx, const std::int32_t* dy, std::size_t n);
std::size_t merge_row(const MergeRow& row);

}  // namespace prefine::simd::scalar

namespace prefine::simd::detail {

// Defined in the ISA-specific translation units; null when not compiled in.
const KernelTable* avx2_table();
const KernelTable* neon_table();
bool cpu_has_avx2();

}  // namespace prefine::simd::detail
