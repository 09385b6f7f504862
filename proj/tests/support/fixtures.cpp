#include "fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "oracles.hpp"

namespace prefine::testing {

Raster random_raster(int width, int height, int channels, std::uint64_t seed, Point origin) {
  Raster out(width, height, channels, origin);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> dist(0.0f, 1.0f);
  for (float& v : out.data()) v = dist(rng);
  return out;
}

Mask random_mask(int width, int height, double density, std::uint64_t seed, Point origin) {
  Mask out(width, height, origin);
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(density);
  for (auto& b : out.bits()) b = coin(rng) ? 1 : 0;
  return out;
}

Raster texture(int width, int height, int channels, std::uint64_t seed, double period) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  struct Wave {
    double kx, ky, phase, amp;
    int channel_mix;
  };
  std::vector<Wave> waves;
  double amp_total = 0.0;
  for (double wl = period; wl >= 3.0; wl /= 2.0) {
    for (int j = 0; j < 3; ++j) {
      const double theta = uni(rng) * std::numbers::pi;
      const double k = 2.0 * std::numbers::pi / (wl * (0.8 + 0.4 * uni(rng)));
      const double amp = std::sqrt(wl / period);
      waves.push_back({k * std::cos(theta), k * std::sin(theta), uni(rng) * 2.0 * std::numbers::pi, amp,
                       static_cast<int>(uni(rng) * 3.0)});
      amp_total += amp;
    }
  }

  Raster out(width, height, channels);
  std::vector<double> acc(static_cast<std::size_t>(width));
  for (int y = 0; y < height; ++y) {
    for (int c = 0; c < channels; ++c) {
      std::fill(acc.begin(), acc.end(), 0.0);
      for (const Wave& w : waves) {
        const double a = w.amp * (w.channel_mix == c ? 1.0 : 0.6);
        for (int x = 0; x < width; ++x) acc[static_cast<std::size_t>(x)] += a * std::sin(w.kx * x + w.ky * y + w.phase);
      }
      float* row = out.row(c, y);
      for (int x = 0; x < width; ++x) {
        row[x] = static_cast<float>(0.5 + 0.22 * acc[static_cast<std::size_t>(x)] / amp_total * 2.0);
      }
    }
  }

  // Hard-edged shapes supply corners and blobs for feature detectors.
  const int shapes = std::max(8, static_cast<int>(static_cast<double>(width) * height / 6000.0));
  for (int s = 0; s < shapes; ++s) {
    const double cx = uni(rng) * width;
    const double cy = uni(rng) * height;
    const double rx = 3.0 + uni(rng) * 22.0;
    const double ry = 3.0 + uni(rng) * 22.0;
    const bool ellipse = uni(rng) < 0.5;
    const double shade = uni(rng) < 0.5 ? -0.25 - 0.2 * uni(rng) : 0.25 + 0.2 * uni(rng);
    const int x0 = std::max(0, static_cast<int>(cx - rx) - 1);
    const int x1 = std::min(width, static_cast<int>(cx + rx) + 2);
    const int y0 = std::max(0, static_cast<int>(cy - ry) - 1);
    const int y1 = std::min(height, static_cast<int>(cy + ry) + 2);
    for (int y = y0; y < y1; ++y) {
      for (int x = x0; x < x1; ++x) {
        const double u = (x - cx) / rx;
        const double v = (y - cy) / ry;
        const bool inside = ellipse ? (u * u + v * v <= 1.0) : (std::abs(u) <= 1.0 && std::abs(v) <= 1.0);
        if (!inside) continue;
        for (int c = 0; c < channels; ++c) {
          out.at(c, x, y) += static_cast<float>(shade * (0.7 + 0.15 * c));
        }
      }
    }
  }
  for (float& v : out.data()) v = std::clamp(v, 0.05f, 0.95f);
  return out;
}

Raster checkerboard(int squares, int cell, float dark, float light) {
  Raster out(squares * cell, squares * cell, 1);
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) {
      out.at(0, x, y) = ((x / cell + y / cell) % 2 == 0) ? light : dark;
    }
  }
  return out;
}

Raster gaussian_blur(const Raster& img, double sigma) {
  const int r = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(static_cast<std::size_t>(2 * r + 1));
  double sum = 0.0;
  for (int i = -r; i <= r; ++i) {
    k[static_cast<std::size_t>(i + r)] = std::exp(-0.5 * i * i / (sigma * sigma));
    sum += k[static_cast<std::size_t>(i + r)];
  }
  for (double& v : k) v /= sum;
  const int w = img.width();
  const int h = img.height();
  Raster tmp(w, h, img.channels(), img.origin());
  Raster out(w, h, img.channels(), img.origin());
  for (int c = 0; c < img.channels(); ++c) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        double acc = 0.0;
        for (int i = -r; i <= r; ++i) acc += k[static_cast<std::size_t>(i + r)] * img.at(c, std::clamp(x + i, 0, w - 1), y);
        tmp.at(c, x, y) = static_cast<float>(acc);
      }
    }
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        double acc = 0.0;
        for (int i = -r; i <= r; ++i) acc += k[static_cast<std::size_t>(i + r)] * tmp.at(c, x, std::clamp(y + i, 0, h - 1));
        out.at(c, x, y) = static_cast<float>(acc);
      }
    }
  }
  return out;
}

Raster box_downsample(const Raster& img, int factor) {
  if (img.width() % factor != 0 || img.height() % factor != 0) {
    throw std::invalid_argument("box_downsample: dims must divide by factor");
  }
  Raster out(img.width() / factor, img.height() / factor, img.channels());
  const double norm = 1.0 / (factor * factor);
  for (int c = 0; c < img.channels(); ++c) {
    for (int y = 0; y < out.height(); ++y) {
      for (int x = 0; x < out.width(); ++x) {
        double acc = 0.0;
        for (int j = 0; j < factor; ++j)
          for (int i = 0; i < factor; ++i) acc += img.at(c, x * factor + i, y * factor + j);
        out.at(c, x, y) = static_cast<float>(acc * norm);
      }
    }
  }
  return out;
}

Raster crop_local(const Raster& img, int x, int y, int width, int height) {
  Raster out(width, height, img.channels());
  for (int c = 0; c < img.channels(); ++c)
    for (int j = 0; j < height; ++j)
      for (int i = 0; i < width; ++i) out.at(c, i, j) = img.at(c, x + i, y + j);
  return out;
}

double psnr(const Raster& a, const Raster& b, const Mask* where) {
  if (a.width() != b.width() || a.height() != b.height() || a.channels() != b.channels()) {
    throw std::invalid_argument("psnr: shape mismatch");
  }
  double se = 0.0;
  std::size_t n = 0;
  for (int c = 0; c < a.channels(); ++c) {
    for (int y = 0; y < a.height(); ++y) {
      for (int x = 0; x < a.width(); ++x) {
        if (where != nullptr && !where->at(x, y)) continue;
        const double d = static_cast<double>(a.at(c, x, y)) - b.at(c, x, y);
        se += d * d;
        ++n;
      }
    }
  }
  if (n == 0) return 0.0;
  const double mse = se / static_cast<double>(n);
  if (mse == 0.0) return 200.0;
  return 10.0 * std::log10(1.0 / mse);
}

double max_abs_diff(const Raster& a, const Raster& b) {
  if (a.data().size() != b.data().size()) return INFINITY;
  double m = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    m = std::max(m, std::abs(static_cast<double>(a.data()[i]) - b.data()[i]));
  }
  return m;
}

double mean(const Raster& img, const Mask* where) {
  double s = 0.0;
  std::size_t n = 0;
  for (int c = 0; c < img.channels(); ++c) {
    for (int y = 0; y < img.height(); ++y) {
      for (int x = 0; x < img.width(); ++x) {
        if (where != nullptr && !where->at(x, y)) continue;
        s += img.at(c, x, y);
        ++n;
      }
    }
  }
  return n ? s / static_cast<double>(n) : 0.0;
}

Homography jitter_homography(std::uint64_t seed, double translate, double linear, double perspective) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  Homography h;
  h.m(0, 0) = 1.0 + linear * uni(rng);
  h.m(0, 1) = linear * uni(rng);
  h.m(1, 0) = linear * uni(rng);
  h.m(1, 1) = 1.0 + linear * uni(rng);
  h.m(0, 2) = translate * uni(rng);
  h.m(1, 2) = translate * uni(rng);
  h.m(2, 0) = perspective * uni(rng);
  h.m(2, 1) = perspective * uni(rng);
  return h;
}

bool same_pixels(const pyramid::AdaptivePyramid& a, const pyramid::AdaptivePyramid& b) {
  if (a.channels() != b.channels() || a.stats() != b.stats()) return false;
  for (int l = a.min_level(); l <= a.top_level(); ++l) {
    const pyramid::LevelGrid& ga = a.grid(l);
    const pyramid::LevelGrid& gb = b.grid(l);
    for (const auto& t : ga.tiles()) {
      const pyramid::Tile* u = gb.find(t->p, t->q);
      if (u == nullptr || !(t->pixels == u->pixels) || !(t->confidence == u->confidence) || !(t->valid == u->valid)) {
        return false;
      }
    }
  }
  return true;
}

bool same_model(const pyramid::AdaptivePyramid& a, const pyramid::AdaptivePyramid& b) {
  if (!same_pixels(a, b)) return false;
  if (!(a.features() == b.features()) || a.data_bounds() != b.data_bounds()) return false;
  if (a.reference_region() != b.reference_region()) return false;
  const auto& ha = a.previous_homography();
  const auto& hb = b.previous_homography();
  if (ha.has_value() != hb.has_value()) return false;
  return !ha || ha->m == hb->m;
}

ZoomScene zoom_scene(int size, std::uint64_t seed) {
  ZoomScene s;
  s.gt = texture(size, size, 3, seed);
  const MaskedRaster r1 = oracle::reduce(s.gt, Mask(size, size, {}, true), 0.01);
  const MaskedRaster r2 = oracle::reduce(r1.image, r1.mask, 0.01);
  s.half = r1.image;
  s.reference = r2.image;
  return s;
}

}  // namespace prefine::testing
