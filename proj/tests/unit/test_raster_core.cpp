#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "prefine/core/color.hpp"
#include "prefine/core/morphology.hpp"
#include "prefine/core/pyramid_ops.hpp"
#include "prefine/core/warp.hpp"

using namespace prefine;
namespace t = prefine::testing;

namespace {

double max_diff_masked(const MaskedRaster& a, const MaskedRaster& b) {
  double m = 0.0;
  for (int c = 0; c < a.image.channels(); ++c)
    for (int y = 0; y < a.image.height(); ++y)
      for (int x = 0; x < a.image.width(); ++x)
        if (a.mask.at(x, y)) m = std::max(m, std::abs(double(a.image.at(c, x, y)) - b.image.at(c, x, y)));
  return m;
}

bool all_finite(const Raster& r) {
  for (float v : r.data())
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace

TEST_SUITE("geometry") {
  TEST_CASE("floor and ceil division handle negatives") {
    CHECK(floor_div(-1, 2) == -1);
    CHECK(floor_div(-4, 2) == -2);
    CHECK(floor_div(5, 2) == 2);
    CHECK(ceil_div(-3, 2) == -1);
    CHECK(ceil_div(3, 2) == 2);
    CHECK(shift_down(-1, 9) == -1);
    CHECK(level_scale(-2) == 0.25);
  }

  TEST_CASE("reduce_rect keeps globally even positions") {
    CHECK(reduce_rect({0, 0, 5, 4}) == PixelRect{0, 0, 3, 2});
    CHECK(reduce_rect({-3, 1, 4, 1}) == PixelRect{-1, 1, 2, 0});
    CHECK(reduce_rect({1, 1, 1, 1}).empty());
  }
}

TEST_SUITE("to_luminance") {
  TEST_CASE("gray input stays gray") {
    Raster img(4, 3, 3, {}, 0.4f);
    const Raster y = to_luminance(img);
    for (float v : y.data()) CHECK(v == doctest::Approx(0.4).epsilon(1e-6));
  }
  TEST_CASE("pure red gives its weight") {
    Raster img(2, 2, 3);
    img.fill(0.0f);
    for (int y = 0; y < 2; ++y)
      for (int x = 0; x < 2; ++x) img.at(0, x, y) = 1.0f;
    const Raster y = to_luminance(img);
    for (float v : y.data()) CHECK(v == doctest::Approx(0.299).epsilon(1e-7));
  }
  TEST_CASE("random image matches a per-pixel recomputation") {
    const Raster img = t::random_raster(37, 29, 3, 5);
    const Raster y = to_luminance(img);
    for (int j = 0; j < img.height(); ++j)
      for (int i = 0; i < img.width(); ++i) {
        const double ref = 0.299 * img.at(0, i, j) + 0.587 * img.at(1, i, j) + 0.114 * img.at(2, i, j);
        CHECK(std::abs(y.at(0, i, j) - ref) <= 1e-6);
        CHECK(y.at(0, i, j) >= 0.0f);
        CHECK(y.at(0, i, j) <= 1.0f);
      }
  }
  TEST_CASE("wrong channel count throws") {
    CHECK_THROWS_AS(to_luminance(Raster(3, 3, 1)), std::invalid_argument);
  }
}

TEST_SUITE("reduce") {
  TEST_CASE("constant image stays constant at half resolution") {
    Raster img(9, 6, 3, {}, 0.5f);
    const MaskedRaster r = reduce(img, Mask(9, 6, {}, true));
    CHECK(r.image.width() == 5);
    CHECK(r.image.height() == 3);
    for (int c = 0; c < 3; ++c)
      for (int y = 0; y < 3; ++y)
        for (int x = 0; x < 5; ++x)
          if (r.mask.at(x, y)) CHECK(r.image.at(c, x, y) == doctest::Approx(0.5).epsilon(1e-7));
    CHECK(r.mask.count() >= 11);
  }
  TEST_CASE("fully invalid mask gives fully invalid output") {
    const MaskedRaster r = reduce(t::random_raster(16, 16, 1, 1), Mask(16, 16));
    CHECK_FALSE(r.mask.any());
  }
  TEST_CASE("one pixel image") {
    const MaskedRaster r = reduce(Raster(1, 1, 1, {}, 0.3f), Mask(1, 1, {}, true));
    CHECK(r.image.width() == 1);
    // 0.375^2 of the kernel weight is inside: below the validity threshold.
    CHECK_FALSE(r.mask.at(0, 0));
  }
  TEST_CASE("output dims are ceil(dim / 2)") {
    for (int w : {1, 2, 3, 4, 17, 64, 65}) {
      const MaskedRaster r = reduce(Raster(w, 3, 1), Mask(w, 3, {}, true));
      CHECK(r.image.width() == (w + 1) / 2);
    }
  }
  TEST_CASE("1-D ramp matches the dense convolution oracle") {
    Raster img(64, 1, 1);
    for (int x = 0; x < 64; ++x) img.at(0, x, 0) = static_cast<float>(x) / 63.0f;
    Mask m(64, 1, {}, true);
    const MaskedRaster got = reduce(img, m);
    const MaskedRaster ref = t::oracle::reduce(img, m);
    CHECK(got.mask == ref.mask);
    CHECK(max_diff_masked(ref, got) <= 1e-6);
  }
  TEST_CASE("random masked images with odd origins match the oracle") {
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
      const Point o{static_cast<int>(seed * 7) - 30, 11 - static_cast<int>(seed * 3)};
      const Raster img = t::random_raster(20 + int(seed) * 5, 13 + int(seed) * 3, seed % 2 ? 3 : 1, seed, o);
      const Mask m = t::random_mask(img.width(), img.height(), 0.7, seed + 100, o);
      const MaskedRaster got = reduce(img, m);
      const MaskedRaster ref = t::oracle::reduce(img, m);
      CHECK(got.image.rect() == ref.image.rect());
      CHECK(got.mask == ref.mask);
      CHECK(max_diff_masked(ref, got) <= 1e-6);
      CHECK(all_finite(got.image));
    }
  }
  TEST_CASE("reduce_mask with weight 1 needs the full support") {
    Mask m(20, 20, {}, true);
    m.set(10, 10, false);
    const Mask strict = reduce_mask(m, 1.0f);
    CHECK_FALSE(strict.at(5, 5));
    CHECK_FALSE(strict.at(4, 4));
    CHECK(strict.at(3, 3));
    CHECK_FALSE(strict.at(0, 0));
    const Mask ref = t::oracle::reduce(Raster(20, 20, 1), m, 1.0).mask;
    CHECK(strict == ref);
  }
}

TEST_SUITE("expand") {
  TEST_CASE("constant image doubles in size and stays constant") {
    const Raster e = expand(Raster(5, 4, 3, {}, 0.5f), 10, 7);
    CHECK(e.width() == 10);
    CHECK(e.height() == 7);
    for (float v : e.data()) CHECK(v == doctest::Approx(0.5).epsilon(1e-7));
  }
  TEST_CASE("reduce then expand of a constant is the identity") {
    Raster img(32, 24, 1, {}, 0.25f);
    const MaskedRaster r = reduce(img, Mask(32, 24, {}, true));
    const MaskedRaster e = expand_to(r.image, r.mask, img.rect());
    CHECK(e.mask.count() == 32u * 24u);
    for (float v : e.image.data()) CHECK(v == doctest::Approx(0.25).epsilon(1e-7));
  }
  TEST_CASE("target size must be 2n-1 or 2n") {
    CHECK_THROWS_AS(expand(Raster(5, 5, 1), 11, 10), std::invalid_argument);
    CHECK_THROWS_AS(expand(Raster(5, 5, 1), 10, 8), std::invalid_argument);
    CHECK_NOTHROW(expand(Raster(5, 5, 1), 9, 10));
  }
  TEST_CASE("masked expand matches the oracle") {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
      const Point o{-3 * int(seed), 2 * int(seed) - 5};
      const Raster c = t::random_raster(11 + int(seed), 9, 3, seed, o);
      const Mask m = t::random_mask(c.width(), c.height(), 0.6, seed + 50, o);
      const PixelRect fine{2 * o.x - 3, 2 * o.y + 1, 2 * c.width() + 5, 2 * c.height() - 1};
      const MaskedRaster got = expand_to(c, m, fine);
      const MaskedRaster ref = t::oracle::expand_to(c, m, fine);
      CHECK(got.mask == ref.mask);
      CHECK(max_diff_masked(ref, got) <= 1e-6);
      const MaskedRaster strict = expand_to(c, m, fine, 1.0f);
      const MaskedRaster strict_ref = t::oracle::expand_to(c, m, fine, true);
      CHECK(strict.mask == strict_ref.mask);
      CHECK(strict.mask == expand_support(m, fine));
      CHECK(max_diff_masked(strict_ref, strict) <= 1e-6);
    }
  }
  TEST_CASE("reconstruction identity: L + expand(reduce(G)) = G") {
    const Raster g = t::random_raster(45, 38, 3, 99);
    const Mask full(45, 38, {}, true);
    const MaskedRaster r = reduce(g, full);
    const MaskedRaster e = expand_to(r.image, r.mask, g.rect());
    REQUIRE(e.mask.count() == full.count());
    double worst = 0.0;
    for (int c = 0; c < 3; ++c)
      for (int y = 0; y < g.height(); ++y)
        for (int x = 0; x < g.width(); ++x) {
          const float l = g.at(c, x, y) - e.image.at(c, x, y);
          worst = std::max(worst, std::abs(double(l + e.image.at(c, x, y)) - g.at(c, x, y)));
        }
    CHECK(worst <= 1e-6);
  }
  TEST_CASE("expand_support lists pixels whose taps are all valid") {
    Mask c(6, 6, {}, true);
    c.set(3, 3, false);
    const Mask s = expand_support(c, {0, 0, 12, 12});
    CHECK_FALSE(s.at(6, 6));
    CHECK_FALSE(s.at(5, 6));
    CHECK_FALSE(s.at(4, 6));
    CHECK(s.at(3, 6));
    CHECK_FALSE(s.at(8, 8));
    CHECK(s.at(9, 9));
    CHECK_FALSE(s.at(0, 0));
    CHECK(s.at(1, 1));
    CHECK(expand_source_rect({0, 0, 12, 12}) == PixelRect{-1, -1, 8, 8});
  }
}

TEST_SUITE("warp_homography") {
  TEST_CASE("identity reproduces the image with full coverage") {
    const Raster img = t::random_raster(31, 17, 3, 4);
    const MaskedRaster w = warp_homography(img, Homography::identity(), img.rect());
    CHECK(w.image == img);
    CHECK(w.mask.count() == 31u * 17u);
  }
  TEST_CASE("half-pixel translation averages horizontal neighbors") {
    const Raster img = t::random_raster(12, 5, 1, 8);
    const MaskedRaster w = warp_homography(img, Homography::translation(-0.5, 0.0), {0, 0, 12, 5});
    for (int y = 0; y < 5; ++y) {
      for (int x = 0; x < 11; ++x) {
        CHECK(w.mask.at(x, y));
        CHECK(w.image.at(0, x, y) == doctest::Approx(0.5 * (img.at(0, x, y) + img.at(0, x + 1, y))).epsilon(1e-6));
      }
      CHECK_FALSE(w.mask.at(11, y));
    }
  }
  TEST_CASE("zoom crop into a level -2 grid matches the per-pixel oracle") {
    const Raster img = t::random_raster(64, 48, 3, 21);
    const Homography h = Homography::scale_translation(0.25, 100.0, 37.0);
    const PixelRect target{395, 143, 70, 55};
    const MaskedRaster got = warp_homography(img, h, target, -2);
    const MaskedRaster ref = t::oracle::warp_homography(img, h, target, -2);
    CHECK(got.mask == ref.mask);
    CHECK(max_diff_masked(ref, got) <= 1e-6);
    CHECK(got.mask.count() > 0u);
  }
  TEST_CASE("perspective warp matches the oracle") {
    const Raster img = t::random_raster(50, 40, 1, 22);
    const Homography h = t::jitter_homography(5, 6.0, 0.1, 5e-4);
    const PixelRect target{-8, -8, 70, 60};
    const MaskedRaster got = warp_homography(img, h, target, 0);
    const MaskedRaster ref = t::oracle::warp_homography(img, h, target, 0);
    CHECK(got.mask == ref.mask);
    CHECK(max_diff_masked(ref, got) <= 1e-6);
  }
  TEST_CASE("singular homography throws") {
    Homography h;
    h.m.setZero();
    CHECK_THROWS_AS(warp_homography(Raster(4, 4, 1), h, {0, 0, 4, 4}), std::domain_error);
  }
}

TEST_SUITE("warp_flow") {
  TEST_CASE("zero flow is the identity") {
    const Raster img = t::random_raster(20, 10, 3, 30);
    const MaskedRaster w = warp_flow(img, make_flow(20, 10));
    CHECK(w.image == img);
    CHECK(w.mask.count() == 200u);
  }
  TEST_CASE("integer flow shifts and leaves an invalid strip") {
    const Raster img = t::random_raster(20, 6, 1, 31);
    FlowField f = make_flow(20, 6);
    for (int y = 0; y < 6; ++y)
      for (int x = 0; x < 20; ++x) f.at(0, x, y) = 3.0f;
    const MaskedRaster w = warp_flow(img, f);
    for (int y = 0; y < 6; ++y) {
      for (int x = 0; x < 17; ++x) {
        CHECK(w.mask.at(x, y));
        CHECK(w.image.at(0, x, y) == img.at(0, x + 3, y));
      }
      for (int x = 17; x < 20; ++x) CHECK_FALSE(w.mask.at(x, y));
    }
  }
  TEST_CASE("smooth random flow matches the resampling oracle") {
    const Raster img = t::random_raster(40, 30, 3, 32);
    FlowField f = make_flow(40, 30);
    for (int y = 0; y < 30; ++y)
      for (int x = 0; x < 40; ++x) {
        f.at(0, x, y) = static_cast<float>(2.5 * std::sin(x * 0.13 + y * 0.05));
        f.at(1, x, y) = static_cast<float>(1.7 * std::cos(x * 0.07 - y * 0.11));
      }
    const MaskedRaster got = warp_flow(img, f);
    const MaskedRaster ref = t::oracle::warp_flow(img, f);
    CHECK(got.mask == ref.mask);
    CHECK(max_diff_masked(ref, got) <= 1e-6);
  }
}

TEST_SUITE("morphology") {
  TEST_CASE("isolated pixel disappears under opening") {
    Mask m(21, 21);
    m.set(10, 10, true);
    CHECK_FALSE(morph_open_close(m, 3, 4).any());
  }
  TEST_CASE("closing fills a one-pixel hole in a block") {
    Mask m(100, 100, {}, true);
    m.set(60, 60, false);
    const Mask out = morph_open_close(m, 3, 4);
    CHECK(out.count() == 100u * 100u);
  }
  TEST_CASE("random masks match the naive oracle") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const Mask m = t::random_mask(47, 39, 0.3 + 0.1 * double(seed), seed);
      for (int r = 0; r <= 4; ++r) {
        CHECK(erode(m, r) == t::oracle::erode(m, r));
        CHECK(dilate(m, r) == t::oracle::dilate(m, r));
      }
      CHECK(morph_open_close(m, 3, 4) == t::oracle::open_close(m, 3, 4));
    }
  }
  TEST_CASE("open-close is idempotent") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const Mask m = t::random_mask(64, 64, 0.55, seed + 40);
      const Mask once = morph_open_close(m, 3, 4);
      CHECK(morph_open_close(once, 3, 4) == once);
    }
  }
  TEST_CASE("disk membership uses dx^2 + dy^2 <= r^2") {
    Mask m(11, 11);
    m.set(5, 5, true);
    const Mask d = dilate(m, 2);
    CHECK(d.at(7, 5));
    CHECK(d.at(6, 6));
    CHECK_FALSE(d.at(7, 6));
    CHECK(d.count() == 13u);
  }
  TEST_CASE("negative radius throws") { CHECK_THROWS(erode(Mask(3, 3), -1)); }
}
