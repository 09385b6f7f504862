#pragma once

// Data-parallel inner loops used by the raster, pyramid and merge code.
//
// Every kernel has a scalar reference implementation and, where the CPU
// supports it, a vector variant. Vector variants evaluate the same
// operations in the same order as the scalar code (no fused multiply-add),
// so results are bit-identical across variants; tests/unit/test_simd_kernels
// checks this.

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace prefine::simd {

enum class Isa { scalar, avx2, neon };

std::string_view isa_name(Isa isa);

/// Arguments of one merge row: a run of pixels of one model tile row.
struct MergeRow {
  float* model[3];
  float* model_confidence;
  std::uint8_t* model_valid;
  const float* obs[3];
  const float* obs_confidence;
  const std::uint8_t* replace_allowed;  // interior pixels: write if c_obs < c_model
  const std::uint8_t* fill_allowed;     // new-area pixels: write only where model is empty
  std::size_t n;
};

struct KernelTable {
  Isa isa;

  /// out[i] = w[0]*rows[0][i] + w[1]*rows[1][i] + ... accumulated left to right.
  void (*weighted_sum)(float* out, const float* const* rows, const float* weights, int count,
                       std::size_t n);

  /// out[i] = a[i] * b[i]
  void (*multiply)(float* out, const float* a, const float* b, std::size_t n);

  /// Normalized-convolution finish: where den >= min_weight and den > 0,
  /// value[c][i] /= den[i] and valid = 1; elsewhere value = 0 and valid = 0.
  void (*normalize)(float* const* values, int channels, const float* den, std::uint8_t* valid,
                    float min_weight, std::size_t n);

  /// out = 0.299 r + 0.587 g + 0.114 b
  void (*luminance)(float* out, const float* r, const float* g, const float* b, std::size_t n);

  /// out = g - (e_valid ? e : 0)
  void (*subtract_masked)(float* out, const float* g, const float* e, const std::uint8_t* e_valid,
                          std::size_t n);

  /// out = (l_valid ? l : 0) + (e_valid ? e : 0)
  void (*add_masked)(float* out, const float* l, const std::uint8_t* l_valid, const float* e,
                     const std::uint8_t* e_valid, std::size_t n);

  /// out[i] = a[i] & b[i], out[i] = a[i] | b[i] on 0/1 bytes
  void (*mask_and)(std::uint8_t* out, const std::uint8_t* a, const std::uint8_t* b, std::size_t n);
  void (*mask_or)(std::uint8_t* out, const std::uint8_t* a, const std::uint8_t* b, std::size_t n);

  /// Bilinear resampling of `channels` planes (stride `src_stride`). Per output
  /// pixel: integer base (x0, y0), fractions (fx, fy) and the neighbor offsets
  /// dx, dy in {0, 1} (0 when the fraction is exactly zero).
  void (*bilinear)(float* const* out, const float* const* src, int channels, int src_stride,
                   const std::int32_t* x0, const std::int32_t* y0, const float* fx, const float* fy,
                   const std::int32_t* dx, const std::int32_t* dy, std::size_t n);

  /// Confidence-based replacement for one row; returns the number of pixels written.
  std::size_t (*merge_row)(const MergeRow& row);
};

const KernelTable& scalar_kernels();

/// Vector variant for this build/CPU, or nullptr when unavailable.
const KernelTable* avx2_kernels();
const KernelTable* neon_kernels();

/// Kernels used by the library. Chosen once from CPU features; the
/// PREFINE_ISA environment variable ("scalar", "avx2", "neon") overrides.
const KernelTable& active_kernels();

/// Switches the active table (tests and benchmarks). Returns false if the ISA
/// is not available on this machine.
bool set_active_isa(Isa isa);

}  // namespace prefine::simd
