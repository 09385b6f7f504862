#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "prefine/core/pyramid_ops.hpp"
#include "prefine/pyramid/adaptive_pyramid.hpp"

using namespace prefine;
using namespace prefine::pyramid;
namespace t = prefine::testing;

namespace {

double max_diff_on(const MaskedRaster& a, const Raster& b) {
  double m = 0.0;
  for (int c = 0; c < a.image.channels(); ++c)
    for (int y = 0; y < a.image.height(); ++y)
      for (int x = 0; x < a.image.width(); ++x)
        if (a.mask.at(x, y)) m = std::max(m, std::abs(double(a.image.at(c, x, y)) - b.at(c, x, y)));
  return m;
}

double max_diff_masked(const MaskedRaster& a, const MaskedRaster& b) {
  double m = 0.0;
  for (int c = 0; c < a.image.channels(); ++c)
    for (int y = 0; y < a.image.height(); ++y)
      for (int x = 0; x < a.image.width(); ++x)
        if (a.mask.at(x, y) || b.mask.at(x, y))
          m = std::max(m, std::abs(double(a.image.at(c, x, y)) - b.image.at(c, x, y)));
  return m;
}

}  // namespace

TEST_SUITE("tiles") {
  TEST_CASE("tile, pixel and world coordinates round-trip including negatives") {
    for (int level : {-3, 0, 2}) {
      for (int p : {-7, -1, 0, 3}) {
        for (int q : {-2, 0, 5}) {
          const WorldRect w = tile_world_rect(level, p, q);
          const PixelRect px = world_to_level_rect(w, level);
          CHECK(px == tile_pixel_rect(p, q));
          CHECK(tiles_covering(px) == TileRect{p, q, p, q});
        }
      }
    }
    CHECK(tiles_covering({-1, -513, 2, 514}) == TileRect{-1, -2, 0, 0});
  }

  TEST_CASE("payload size of a 3-channel tile") { CHECK(tile_payload_bytes(3) == 4227072u); }

  TEST_CASE("growing the node box allocates no tiles and is idempotent") {
    LevelGrid g(0, 3);
    g.grow({-500, -500, 499, 499});
    CHECK(g.tile_count() == 0u);
    CHECK(g.node_bbox().cols() * g.node_bbox().rows() == 1000000);
    const std::size_t bytes = g.node_array_bytes();
    g.grow({-500, -500, 499, 499});
    CHECK(g.node_array_bytes() == bytes);
    CHECK(g.tile_count() == 0u);
  }

  TEST_CASE("writing one far pixel allocates exactly one tile") {
    LevelGrid g(0, 3);
    g.grow({0, 0, 3, 2});
    MaskedRaster px{Raster(1, 1, 3, {100000, -70000}, 0.5f), Mask(1, 1, {100000, -70000}, true)};
    g.store(px, nullptr, -1.0f);
    CHECK(g.tile_count() == 1u);
    const Tile* tile = g.find(floor_div(100000, 512), floor_div(-70000, 512));
    REQUIRE(tile != nullptr);
    CHECK(g.read_confidence({100000, -70000, 1, 1}).at(0, 0, 0) == -1.0f);
    CHECK(g.read_confidence({0, 0, 1, 1}).at(0, 0, 0) == kUnwrittenConfidence);
    CHECK(g.node_bbox().contains(0, 0));
  }

  TEST_CASE("store skips invalid pixels and tiles without valid pixels") {
    LevelGrid g(0, 1);
    MaskedRaster src{Raster(1100, 3, 1, {-10, 0}, 0.3f), Mask(1100, 3, {-10, 0})};
    src.mask.set(5, 1, true);
    g.store(src, nullptr);
    CHECK(g.tile_count() == 1u);
    const MaskedRaster back = g.read({-10, 0, 1100, 3});
    CHECK(back.mask == src.mask);
  }
}

TEST_SUITE("decompose") {
  TEST_CASE("depth rule") {
    CHECK(decomposition_top(2048, 1536, 0, 0) == 8);
    CHECK(decomposition_top(512, 512, -2, 8) == 8);
    CHECK(decomposition_top(512, 512, -2, 0) == 5);
    CHECK(decomposition_top(7, 100, 3, 0) == 3);
  }

  TEST_CASE("constant image has zero Laplacians and a constant top") {
    Raster img(40, 30, 3, {}, 0.6f);
    const LaplacianStack s = decompose(img, Mask(40, 30, {}, true), 3, 0);
    for (const auto& [l, lap] : s.laplacian)
      for (int c = 0; c < 3; ++c)
        for (int y = 0; y < lap.image.height(); ++y)
          for (int x = 0; x < lap.image.width(); ++x)
            if (lap.mask.at(x, y)) CHECK(std::abs(lap.image.at(c, x, y)) <= 1e-6);
    for (int y = 0; y < s.top_gaussian.image.height(); ++y)
      for (int x = 0; x < s.top_gaussian.image.width(); ++x)
        if (s.top_gaussian.mask.at(x, y)) CHECK(s.top_gaussian.image.at(0, x, y) == doctest::Approx(0.6).epsilon(1e-6));
  }

  TEST_CASE("random 64x64, 3 levels, matches the dense oracle") {
    const Raster img = t::random_raster(64, 64, 3, 77, {-32, 10});
    const Mask mask = t::random_mask(64, 64, 0.9, 78, {-32, 10});
    const LaplacianStack s = decompose(img, mask, 2, -1);
    const auto ref = t::oracle::decompose(img, mask, -1, 2);
    CHECK(s.laplacian.size() == 3u);
    for (int l = -1; l < 2; ++l) {
      CAPTURE(l);
      const MaskedRaster& got = s.laplacian.at(l);
      const MaskedRaster& want = ref.laplacian.at(l);
      CHECK(got.mask == want.mask);
      CHECK(max_diff_masked(got, want) <= 1e-6);
    }
  }

  TEST_CASE("reconstruct returns the input at every valid pixel") {
    const Raster img = t::random_raster(101, 77, 3, 5, {3, -9});
    const Mask mask = t::random_mask(101, 77, 0.75, 6, {3, -9});
    const LaplacianStack s = decompose(img, mask, 4, 0);
    const MaskedRaster r = reconstruct(s, 0);
    for (int y = 0; y < 77; ++y)
      for (int x = 0; x < 101; ++x)
        if (mask.at(x, y)) {
          REQUIRE(r.mask.at(x, y));
          for (int c = 0; c < 3; ++c) REQUIRE(std::abs(r.image.at(c, x, y) - img.at(c, x, y)) <= 1e-5);
        }
  }

  TEST_CASE("degenerate input throws") {
    CHECK_THROWS_AS(decompose(Raster(1, 5, 1), Mask(1, 5, {}, true), 2, 0), std::invalid_argument);
    CHECK_THROWS_AS(decompose(Raster(5, 5, 1), Mask(5, 5, {}, true), 0, 1), std::invalid_argument);
  }
}

TEST_SUITE("adaptive pyramid") {
  TEST_CASE("2048x1536 reference: levels 0..8, 12 level-0 tiles, confidence 0") {
    const Raster ref = t::texture(2048, 1536, 3, 1);
    const AdaptivePyramid m = AdaptivePyramid::init_from_reference(ref);
    CHECK(m.min_level() == 0);
    CHECK(m.top_level() == 8);
    const PyramidStats s = m.stats();
    CHECK(s.laplacian_tiles.size() == 8u);
    CHECK(s.laplacian_tiles.at(0) == 12u);
    CHECK(m.laplacian(0).node_bbox() == TileRect{0, 0, 3, 2});
    CHECK(s.payload_bytes == s.total_tiles * tile_payload_bytes(3));
    for (int l = 0; l <= 8; ++l) {
      for (const auto& tile : m.grid(l).tiles())
        for (int y = 0; y < kTileSize; ++y)
          for (int x = 0; x < kTileSize; ++x)
            if (tile->valid.at(x, y)) REQUIRE(tile->confidence.at(0, x, y) == 0.0f);
    }
    const MaskedRaster flat = m.flatten(0);
    CHECK(flat.image.width() == 2048);
    CHECK(flat.mask.count() == 2048u * 1536u);
    CHECK(max_diff_on(flat, ref) <= 1e-5);
  }

  TEST_CASE("small references are rejected") {
    CHECK_THROWS_AS(AdaptivePyramid::init_from_reference(Raster(15, 40, 3)), std::invalid_argument);
  }

  TEST_CASE("expand_lateral never allocates payload") {
    AdaptivePyramid m = AdaptivePyramid::init_from_reference(t::texture(300, 200, 3, 2));
    const PyramidStats before = m.stats();
    m.expand_lateral(0, {-1000, -1000, 1000, 1000});
    m.expand_lateral(0, {-1000, -1000, 1000, 1000});
    const PyramidStats after = m.stats();
    CHECK(after.payload_bytes == before.payload_bytes);
    CHECK(after.total_tiles == before.total_tiles);
    CHECK(after.node_array_bytes > before.node_array_bytes);
  }

  TEST_CASE("expand_up keeps every flatten and adds the levels") {
    const Raster ref = t::texture(700, 500, 3, 3);
    AdaptivePyramid m = AdaptivePyramid::init_from_reference(ref);
    const int old_top = m.top_level();
    std::vector<MaskedRaster> before;
    for (int l = 0; l <= old_top; ++l) before.push_back(m.flatten(l));
    const std::size_t old_top_tiles = m.top_gaussian().tile_count();
    m.expand_up(old_top + 2);
    CHECK(m.top_level() == old_top + 2);
    CHECK(m.stats().laplacian_tiles.size() == static_cast<std::size_t>(old_top + 2));
    CHECK(m.top_gaussian().tile_count() <= (old_top_tiles + 3) / 4 + 1);
    for (int l = 0; l <= old_top; ++l) {
      CAPTURE(l);
      const MaskedRaster after = m.flatten(l);
      CHECK(after.mask == before[static_cast<std::size_t>(l)].mask);
      CHECK(max_diff_masked(after, before[static_cast<std::size_t>(l)]) <= 1e-5);
    }
    // The old top keeps its confidence; new levels inherit it.
    for (int l = old_top; l <= old_top + 2; ++l)
      for (const auto& tile : m.grid(l).tiles())
        for (int y = 0; y < kTileSize; ++y)
          for (int x = 0; x < kTileSize; ++x)
            if (tile->valid.at(x, y)) REQUIRE(tile->confidence.at(0, x, y) == 0.0f);
  }

  TEST_CASE("expand_up tile counts shrink by about four per level") {
    // A reference large enough that its top-level Gaussian spans several tiles
    // is too costly here, so drive the arithmetic with a hand-made top level.
    AdaptivePyramid m(1, 0, 0);
    MaskedRaster top{Raster(2048, 1536, 1, {}, 0.5f), Mask(2048, 1536, {}, true)};
    m.top_gaussian().store(top, nullptr, 0.0f);
    CHECK(m.top_gaussian().tile_count() == 12u);
    m.expand_up(1);
    CHECK(m.laplacian(0).tile_count() == 12u);
    CHECK(m.top_gaussian().tile_count() == 4u);  // ceil(4/2) x ceil(3/2)
    m.expand_up(2);
    CHECK(m.top_gaussian().tile_count() == 1u);
  }

  TEST_CASE("expand_down adds empty levels, rescales features, keeps flatten") {
    const Raster ref = t::texture(300, 260, 3, 4);
    AdaptivePyramid m = AdaptivePyramid::init_from_reference(ref);
    m.features().push_back({100.0, 50.0, 2.0f, 0.0f, {}});
    const MaskedRaster before = m.flatten(0);
    const std::size_t tiles = m.tile_count();
    m.expand_down(-1);
    CHECK(m.min_level() == -1);
    CHECK(m.tile_count() == tiles);
    CHECK(m.features()[0].x == 200.0);
    CHECK(m.features()[0].y == 100.0);
    const MaskedRaster after = m.flatten(0);
    CHECK(after.image == before.image);
    CHECK(after.mask == before.mask);
    m.expand_down(-3);
    CHECK(m.features()[0].x == 800.0);
  }

  TEST_CASE("flatten where only coarse levels exist equals iterated expand") {
    const Raster ref = t::texture(256, 256, 1, 5);
    AdaptivePyramid m = AdaptivePyramid::init_from_reference(ref);
    m.expand_down(-2);
    const MaskedRaster fine = m.flatten({0, 0, 64, 64}, -2);
    MaskedRaster g = m.reconstruct(0, expand_source_rect(expand_source_rect(fine.image.rect())));
    g = expand_level(g, expand_source_rect(fine.image.rect()));
    g = expand_level(g, fine.image.rect());
    CHECK(g.image == fine.image);
    CHECK(g.mask == fine.mask);
  }

  TEST_CASE("random sparse pyramid matches the dense reconstruction oracle") {
    AdaptivePyramid m(3, -1, 3);
    t::oracle::DensePyramid ref;
    ref.base = -1;
    ref.top_level = 3;
    std::uint64_t seed = 300;
    PixelRect rect{-40, 20, 130, 90};
    std::map<int, PixelRect> rects;
    for (int l = -1; l <= 3; ++l) {
      rects[l] = rect;
      rect = reduce_rect(rect);
    }
    for (int l = -1; l <= 3; ++l) {
      const PixelRect r = rects[l];
      MaskedRaster lvl{t::random_raster(r.width, r.height, 3, ++seed, {r.x0, r.y0}),
                       t::random_mask(r.width, r.height, 0.7, ++seed, {r.x0, r.y0})};
      for (float& v : lvl.image.data()) v -= 0.5f;
      for (int c = 0; c < 3; ++c)
        for (int y = 0; y < r.height; ++y)
          for (int x = 0; x < r.width; ++x)
            if (!lvl.mask.at(x, y)) lvl.image.at(c, x, y) = 0.0f;
      m.grid(l).store(lvl, nullptr);
      if (l < 3) ref.laplacian[l] = lvl;
      else ref.top = lvl;
    }
    const MaskedRaster got = m.reconstruct(-1, rects[-1]);
    const MaskedRaster want = t::oracle::reconstruct(ref, -1);
    CHECK(got.mask == want.mask);
    CHECK(max_diff_masked(got, want) <= 1e-5);
  }

  TEST_CASE("flatten of an empty region throws") {
    const AdaptivePyramid m = AdaptivePyramid::init_from_reference(t::texture(64, 64, 3, 6));
    CHECK_THROWS_AS((void)m.flatten({5000, 5000, 5100, 5100}, 0), std::runtime_error);
  }
}
