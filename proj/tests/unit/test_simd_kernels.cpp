#include <doctest.h>

#include <cstring>
#include <random>
#include <vector>

#include "fixtures.hpp"
#include "prefine/core/pyramid_ops.hpp"
#include "prefine/core/warp.hpp"
#include "prefine/simd/kernels.hpp"

using namespace prefine;

namespace {

std::vector<const simd::KernelTable*> vector_tables() {
  std::vector<const simd::KernelTable*> out;
  if (const auto* t = simd::avx2_kernels()) out.push_back(t);
  if (const auto* t = simd::neon_kernels()) out.push_back(t);
  return out;
}

std::vector<float> floats(std::size_t n, std::mt19937_64& rng, float lo = -2.0f, float hi = 2.0f) {
  std::uniform_real_distribution<float> d(lo, hi);
  std::vector<float> v(n);
  for (float& x : v) x = d(rng);
  return v;
}

std::vector<std::uint8_t> bytes(std::size_t n, std::mt19937_64& rng) {
  std::bernoulli_distribution d(0.5);
  std::vector<std::uint8_t> v(n);
  for (auto& b : v) b = d(rng) ? 1 : 0;
  return v;
}

bool same_bits(const std::vector<float>& a, const std::vector<float>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(float)) == 0;
}

struct IsaGuard {
  ~IsaGuard() { simd::set_active_isa(simd::Isa::scalar); }
};

const std::size_t kSizes[] = {0, 1, 3, 7, 8, 9, 15, 16, 17, 31, 33, 64, 67, 255, 1000};

}  // namespace

TEST_CASE("scalar table is always available") {
  CHECK(simd::scalar_kernels().isa == simd::Isa::scalar);
  CHECK(simd::set_active_isa(simd::Isa::scalar));
  CHECK(simd::active_kernels().isa == simd::Isa::scalar);
}

TEST_CASE("vector kernels match scalar kernels bit for bit") {
  const auto tables = vector_tables();
  if (tables.empty()) {
    MESSAGE("no vector ISA on this machine; nothing to compare");
    return;
  }
  const auto& s = simd::scalar_kernels();
  std::mt19937_64 rng(7);
  for (const auto* v : tables) {
    CAPTURE(simd::isa_name(v->isa));
    for (std::size_t n : kSizes) {
      CAPTURE(n);
      for (int count = 1; count <= 5; ++count) {
        std::vector<std::vector<float>> rows;
        std::vector<const float*> ptrs;
        for (int k = 0; k < count; ++k) rows.push_back(floats(n, rng));
        for (auto& r : rows) ptrs.push_back(r.data());
        const std::vector<float> w = floats(static_cast<std::size_t>(count), rng);
        std::vector<float> a(n), b(n);
        s.weighted_sum(a.data(), ptrs.data(), w.data(), count, n);
        v->weighted_sum(b.data(), ptrs.data(), w.data(), count, n);
        CHECK(same_bits(a, b));
      }
      {
        const auto x = floats(n, rng), y = floats(n, rng);
        std::vector<float> a(n), b(n);
        s.multiply(a.data(), x.data(), y.data(), n);
        v->multiply(b.data(), x.data(), y.data(), n);
        CHECK(same_bits(a, b));
      }
      {
        const auto r = floats(n, rng, 0, 1), g = floats(n, rng, 0, 1), bl = floats(n, rng, 0, 1);
        std::vector<float> a(n), b(n);
        s.luminance(a.data(), r.data(), g.data(), bl.data(), n);
        v->luminance(b.data(), r.data(), g.data(), bl.data(), n);
        CHECK(same_bits(a, b));
      }
      {
        auto den = floats(n, rng, 0.0f, 1.0f);
        if (n > 2) den[1] = 0.0f;
        std::vector<std::vector<float>> va(3), vb(3);
        float* pa[3];
        float* pb[3];
        for (int c = 0; c < 3; ++c) {
          va[c] = floats(n, rng);
          vb[c] = va[c];
          pa[c] = va[c].data();
          pb[c] = vb[c].data();
        }
        std::vector<std::uint8_t> ma(n), mb(n);
        for (float mw : {0.0f, 0.5f, 1.0f}) {
          s.normalize(pa, 3, den.data(), ma.data(), mw, n);
          v->normalize(pb, 3, den.data(), mb.data(), mw, n);
          for (int c = 0; c < 3; ++c) CHECK(same_bits(va[c], vb[c]));
          CHECK(ma == mb);
        }
      }
      {
        const auto g = floats(n, rng), e = floats(n, rng);
        const auto ev = bytes(n, rng), gv = bytes(n, rng);
        std::vector<float> a(n), b(n);
        s.subtract_masked(a.data(), g.data(), e.data(), ev.data(), n);
        v->subtract_masked(b.data(), g.data(), e.data(), ev.data(), n);
        CHECK(same_bits(a, b));
        s.add_masked(a.data(), g.data(), gv.data(), e.data(), ev.data(), n);
        v->add_masked(b.data(), g.data(), gv.data(), e.data(), ev.data(), n);
        CHECK(same_bits(a, b));
        std::vector<std::uint8_t> ma(n), mb(n);
        s.mask_and(ma.data(), ev.data(), gv.data(), n);
        v->mask_and(mb.data(), ev.data(), gv.data(), n);
        CHECK(ma == mb);
        s.mask_or(ma.data(), ev.data(), gv.data(), n);
        v->mask_or(mb.data(), ev.data(), gv.data(), n);
        CHECK(ma == mb);
      }
      {
        const int stride = 40;
        const auto plane = floats(static_cast<std::size_t>(stride) * 40, rng, 0, 1);
        std::uniform_int_distribution<int> pos(0, 38);
        std::vector<std::int32_t> x0(n), y0(n), dx(n), dy(n);
        std::vector<float> fx = floats(n, rng, 0, 1), fy = floats(n, rng, 0, 1);
        for (std::size_t i = 0; i < n; ++i) {
          x0[i] = pos(rng);
          y0[i] = pos(rng);
          dx[i] = i % 3 ? 1 : 0;
          dy[i] = i % 5 ? 1 : 0;
        }
        const float* src[2] = {plane.data(), plane.data() + 7};
        std::vector<float> a0(n), a1(n), b0(n), b1(n);
        float* oa[2] = {a0.data(), a1.data()};
        float* ob[2] = {b0.data(), b1.data()};
        s.bilinear(oa, src, 2, stride, x0.data(), y0.data(), fx.data(), fy.data(), dx.data(), dy.data(), n);
        v->bilinear(ob, src, 2, stride, x0.data(), y0.data(), fx.data(), fy.data(), dx.data(), dy.data(), n);
        CHECK(same_bits(a0, b0));
        CHECK(same_bits(a1, b1));
      }
      {
        std::vector<std::vector<float>> ma(3), mb(3);
        std::vector<std::vector<float>> obs(3);
        for (int c = 0; c < 3; ++c) {
          ma[c] = floats(n, rng);
          mb[c] = ma[c];
          obs[c] = floats(n, rng);
        }
        auto ca = floats(n, rng, -3, 3);
        auto cb = ca;
        const auto co = floats(n, rng, -3, 3);
        auto va = bytes(n, rng);
        auto vb = va;
        const auto rep = bytes(n, rng), fill = bytes(n, rng);
        simd::MergeRow ra{{ma[0].data(), ma[1].data(), ma[2].data()}, ca.data(), va.data(),
                          {obs[0].data(), obs[1].data(), obs[2].data()}, co.data(), rep.data(), fill.data(), n};
        simd::MergeRow rb = ra;
        for (int c = 0; c < 3; ++c) rb.model[c] = mb[c].data();
        rb.model_confidence = cb.data();
        rb.model_valid = vb.data();
        CHECK(s.merge_row(ra) == v->merge_row(rb));
        for (int c = 0; c < 3; ++c) CHECK(same_bits(ma[c], mb[c]));
        CHECK(same_bits(ca, cb));
        CHECK(va == vb);
      }
    }
  }
}

TEST_CASE("pyramid and warp operations are identical under every kernel table") {
  IsaGuard guard;
  const Raster img = testing::random_raster(83, 61, 3, 11, {-5, 3});
  const Mask mask = testing::random_mask(83, 61, 0.8, 12, {-5, 3});
  const Homography h = testing::jitter_homography(3, 4.0, 0.05, 1e-4);

  simd::set_active_isa(simd::Isa::scalar);
  const MaskedRaster red_s = reduce(img, mask);
  const MaskedRaster exp_s = expand_to(red_s.image, red_s.mask, img.rect());
  const MaskedRaster warp_s = warp_homography(img, h, {-10, -4, 70, 50}, 0);

  for (const auto* t : vector_tables()) {
    CAPTURE(simd::isa_name(t->isa));
    REQUIRE(simd::set_active_isa(t->isa));
    const MaskedRaster red_v = reduce(img, mask);
    const MaskedRaster exp_v = expand_to(red_v.image, red_v.mask, img.rect());
    const MaskedRaster warp_v = warp_homography(img, h, {-10, -4, 70, 50}, 0);
    CHECK(red_v.image == red_s.image);
    CHECK(red_v.mask == red_s.mask);
    CHECK(exp_v.image == exp_s.image);
    CHECK(exp_v.mask == exp_s.mask);
    CHECK(warp_v.image == warp_s.image);
    CHECK(warp_v.mask == warp_s.mask);
  }
}
