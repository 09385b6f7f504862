#include "prefine/registration/features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <opencv2/core.hpp>
#include <opencv2/features2d.hpp>
#include <opencv2/imgproc.hpp>

namespace prefine::registration {
namespace {

cv::Mat to_u8(const Raster& gray) {
  cv::Mat out(gray.height(), gray.width(), CV_8UC1);
  for (int y = 0; y < gray.height(); ++y) {
    const float* src = gray.row(0, y);
    auto* dst = out.ptr<std::uint8_t>(y);
    for (int x = 0; x < gray.width(); ++x) {
      dst[x] = static_cast<std::uint8_t>(std::lround(std::clamp(src[x], 0.0f, 1.0f) * 255.0f));
    }
  }
  return out;
}

constexpr float kSiftSigma = 1.6f;
constexpr int kSiftLayers = 3;

// Dominant gradient orientation around (x, y) in the angle convention of the
// SIFT implementation (degrees, y axis pointing up).
float dominant_angle(const cv::Mat& img, float x, float y, float sigma) {
  constexpr int kBins = 36;
  float hist[kBins] = {};
  const int radius = static_cast<int>(std::lround(3.0f * 1.5f * sigma));
  const float weight_scale = -1.0f / (2.0f * (1.5f * sigma) * (1.5f * sigma));
  const int cx = static_cast<int>(std::lround(x));
  const int cy = static_cast<int>(std::lround(y));
  for (int j = -radius; j <= radius; ++j) {
    const int yy = cy + j;
    if (yy <= 0 || yy >= img.rows - 1) continue;
    for (int i = -radius; i <= radius; ++i) {
      const int xx = cx + i;
      if (xx <= 0 || xx >= img.cols - 1) continue;
      const float dx = static_cast<float>(img.at<float>(yy, xx + 1) - img.at<float>(yy, xx - 1));
      const float dy = static_cast<float>(img.at<float>(yy - 1, xx) - img.at<float>(yy + 1, xx));
      const float mag = std::sqrt(dx * dx + dy * dy);
      float deg = cv::fastAtan2(dy, dx);
      int bin = static_cast<int>(std::lround(deg * kBins / 360.0f));
      bin = (bin % kBins + kBins) % kBins;
      hist[bin] += mag * std::exp(static_cast<float>(i * i + j * j) * weight_scale);
    }
  }
  int best = 0;
  for (int b = 1; b < kBins; ++b)
    if (hist[b] > hist[best]) best = b;
  const float l = hist[(best + kBins - 1) % kBins];
  const float r = hist[(best + 1) % kBins];
  const float c = hist[best];
  const float denom = l - 2.0f * c + r;
  const float offset = denom != 0.0f ? 0.5f * (l - r) / denom : 0.0f;
  float bin = static_cast<float>(best) + offset;
  bin = bin < 0 ? bin + kBins : (bin >= kBins ? bin - kBins : bin);
  float angle = 360.0f - bin * (360.0f / kBins);
  if (angle >= 360.0f) angle -= 360.0f;
  return angle;
}

std::vector<cv::KeyPoint> detect_corners(const cv::Mat& u8, const DetectorConfig& cfg) {
  std::vector<cv::KeyPoint> out;
  cv::Mat level = u8;
  for (int s = 0; s < cfg.corner_levels; ++s) {
    if (s > 0) {
      cv::Mat next;
      cv::pyrDown(level, next);
      level = next;
    }
    if (level.cols < 32 || level.rows < 32) break;
    std::vector<cv::Point2f> pts;
    cv::goodFeaturesToTrack(level, pts, cfg.max_corners_per_level, cfg.corner_quality, cfg.corner_min_distance);
    if (pts.empty()) continue;
    cv::cornerSubPix(level, pts, cv::Size(4, 4), cv::Size(-1, -1),
                     cv::TermCriteria(cv::TermCriteria::COUNT | cv::TermCriteria::EPS, 30, 0.01));
    cv::Mat smooth;
    level.convertTo(smooth, CV_32F, 1.0 / 255.0);
    const float sigma = kSiftSigma * std::pow(2.0f, 1.0f / kSiftLayers);
    cv::GaussianBlur(smooth, smooth, cv::Size(), sigma);
    const float scale = static_cast<float>(1 << s);
    for (const cv::Point2f& p : pts) {
      cv::KeyPoint kp;
      kp.pt = cv::Point2f(p.x * scale, p.y * scale);
      kp.size = 2.0f * sigma * scale;
      kp.angle = dominant_angle(smooth, p.x, p.y, sigma);
      kp.response = 0.0f;
      kp.octave = s + (1 << 8);  // octave s, layer 1
      kp.class_id = 1;
      out.push_back(kp);
    }
  }
  return out;
}

bool keypoint_less(const cv::KeyPoint& a, const cv::KeyPoint& b) {
  if (a.pt.y != b.pt.y) return a.pt.y < b.pt.y;
  if (a.pt.x != b.pt.x) return a.pt.x < b.pt.x;
  if (a.size != b.size) return a.size < b.size;
  if (a.angle != b.angle) return a.angle < b.angle;
  return a.class_id < b.class_id;
}

}  // namespace

FeatureSet detect_features(const Raster& gray, const DetectorConfig& cfg) {
  if (gray.channels() != 1) throw std::invalid_argument("detect_features needs a 1-channel raster");
  FeatureSet out;
  if (gray.width() < 32 || gray.height() < 32) return out;
  const cv::Mat u8 = to_u8(gray);

  cv::Ptr<cv::SIFT> sift = cv::SIFT::create(0, kSiftLayers, cfg.contrast_threshold, 10.0, kSiftSigma);
  std::vector<cv::KeyPoint> blobs;
  sift->detect(u8, blobs);
  for (auto& kp : blobs) kp.class_id = 0;

  std::vector<cv::KeyPoint> kps = detect_corners(u8, cfg);
  // Strongest blobs first when capping; corners are capped per level already.
  std::stable_sort(blobs.begin(), blobs.end(), [](const cv::KeyPoint& a, const cv::KeyPoint& b) {
    if (a.response != b.response) return a.response > b.response;
    return keypoint_less(a, b);
  });
  if (cfg.max_features > 0 && static_cast<int>(blobs.size()) > cfg.max_features) blobs.resize(static_cast<std::size_t>(cfg.max_features));
  kps.insert(kps.end(), blobs.begin(), blobs.end());
  std::sort(kps.begin(), kps.end(), keypoint_less);
  if (kps.empty()) return out;

  cv::Mat desc;
  sift->compute(u8, kps, desc);
  if (desc.rows != static_cast<int>(kps.size())) throw std::runtime_error("descriptor count differs from keypoints");
  out.reserve(kps.size());
  for (std::size_t i = 0; i < kps.size(); ++i) {
    const cv::KeyPoint& kp = kps[i];
    Feature f;
    f.x = kp.pt.x;
    f.y = kp.pt.y;
    f.scale = kp.size;
    f.orientation = kp.angle * static_cast<float>(std::numbers::pi / 180.0);
    const float* d = desc.ptr<float>(static_cast<int>(i));
    f.descriptor.assign(d, d + desc.cols);
    out.push_back(std::move(f));
  }
  return out;
}

std::vector<Correspondence> match_features(const FeatureSet& obs, const FeatureSet& model,
                                           const std::optional<Homography>& prior, const MatchConfig& cfg) {
  std::vector<Correspondence> out;
  if (obs.empty() || model.size() < 2) return out;
  const int dim = static_cast<int>(obs.front().descriptor.size());
  auto pack = [dim](const FeatureSet& fs) {
    cv::Mat m(static_cast<int>(fs.size()), dim, CV_32F);
    for (std::size_t i = 0; i < fs.size(); ++i) {
      if (static_cast<int>(fs[i].descriptor.size()) != dim) throw std::invalid_argument("descriptor length differs");
      std::copy(fs[i].descriptor.begin(), fs[i].descriptor.end(), m.ptr<float>(static_cast<int>(i)));
    }
    return m;
  };
  const cv::Mat q = pack(obs);
  const cv::Mat t = pack(model);
  cv::BFMatcher matcher(cv::NORM_L2, false);
  std::vector<std::vector<cv::DMatch>> knn;
  matcher.knnMatch(q, t, knn, 2);
  for (const auto& pair : knn) {
    if (pair.size() < 2) continue;
    const cv::DMatch& best = pair[0];
    if (!(best.distance < cfg.ratio * pair[1].distance)) continue;
    const Feature& fo = obs[static_cast<std::size_t>(best.queryIdx)];
    const Feature& fm = model[static_cast<std::size_t>(best.trainIdx)];
    Correspondence c;
    c.obs = {fo.x, fo.y};
    c.model = {fm.x, fm.y};
    c.obs_index = best.queryIdx;
    c.model_index = best.trainIdx;
    c.distance = best.distance;
    if (prior) {
      const Eigen::Vector2d predicted = prior->apply(c.obs);
      if (!((predicted - c.model).norm() <= cfg.prior_gate)) continue;
    }
    out.push_back(c);
  }
  return out;
}

}  // namespace prefine::registration
