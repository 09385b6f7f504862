#include "prefine/cli/image_io.hpp"

#include <algorithm>
#include <cmath>
#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

namespace prefine::cli {

std::optional<Raster> read_image(const std::filesystem::path& path) {
  cv::Mat m;
  try {
    m = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
  } catch (const cv::Exception&) {
    return std::nullopt;
  }
  if (m.empty()) return std::nullopt;
  const double scale = m.depth() == CV_16U ? 1.0 / 65535.0 : m.depth() == CV_8U ? 1.0 / 255.0 : 1.0;
  cv::Mat f;
  m.convertTo(f, CV_32F, scale);
  const int channels = f.channels() == 1 ? 1 : 3;
  Raster out(f.cols, f.rows, channels);
  for (int y = 0; y < f.rows; ++y) {
    const float* src = f.ptr<float>(y);
    const int step = f.channels();
    for (int x = 0; x < f.cols; ++x) {
      if (channels == 1) {
        out.at(0, x, y) = src[x];
      } else {
        // OpenCV orders colour channels BGR(A).
        for (int c = 0; c < 3; ++c) out.at(c, x, y) = src[x * step + (2 - c)];
      }
    }
  }
  return out;
}

bool write_image(const std::filesystem::path& path, const Raster& img, const Mask* mask) {
  if (img.empty() || (img.channels() != 1 && img.channels() != 3)) return false;
  const int channels = img.channels();
  cv::Mat m(img.height(), img.width(), channels == 1 ? CV_8UC1 : CV_8UC3);
  for (int y = 0; y < img.height(); ++y) {
    auto* dst = m.ptr<std::uint8_t>(y);
    const std::uint8_t* valid = mask != nullptr ? mask->row(y) : nullptr;
    for (int x = 0; x < img.width(); ++x) {
      for (int c = 0; c < channels; ++c) {
        const float v = valid == nullptr || valid[x] ? std::clamp(img.at(c, x, y), 0.0f, 1.0f) : 0.0f;
        dst[x * channels + (channels == 1 ? 0 : 2 - c)] = static_cast<std::uint8_t>(std::lround(v * 255.0f));
      }
    }
  }
  try {
    return cv::imwrite(path.string(), m);
  } catch (const cv::Exception&) {
    return false;
  }
}

}  // namespace prefine::cli
