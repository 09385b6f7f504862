#include "prefine/registration/ransac.hpp"

#include <Eigen/Geometry>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <random>

namespace prefine::registration {
namespace {

// Similarity taking the points to zero mean and mean distance sqrt(2).
Eigen::Matrix3d normalizer(const std::vector<Eigen::Vector2d>& pts) {
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  for (const auto& p : pts) mean += p;
  mean /= static_cast<double>(pts.size());
  double dist = 0.0;
  for (const auto& p : pts) dist += (p - mean).norm();
  dist /= static_cast<double>(pts.size());
  const double s = dist > 0.0 ? std::sqrt(2.0) / dist : 1.0;
  Eigen::Matrix3d t = Eigen::Matrix3d::Identity();
  t(0, 0) = s;
  t(1, 1) = s;
  t(0, 2) = -s * mean.x();
  t(1, 2) = -s * mean.y();
  return t;
}

double cross(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c) {
  const Eigen::Vector2d u = b - a;
  const Eigen::Vector2d v = c - a;
  return u.x() * v.y() - u.y() * v.x();
}

bool degenerate(const Eigen::Vector2d* p) {
  double scale = 0.0;
  for (int i = 1; i < 4; ++i) scale = std::max(scale, (p[i] - p[0]).squaredNorm());
  const double eps = 1e-6 * std::max(scale, 1e-12);
  static constexpr int kTriples[4][3] = {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}};
  for (const auto& t : kTriples)
    if (std::abs(cross(p[t[0]], p[t[1]], p[t[2]])) < eps) return true;
  return false;
}

int required_iterations(double inlier_ratio, double confidence, int cap) {
  const double w4 = std::pow(inlier_ratio, 4.0);
  if (w4 >= 1.0) return 1;
  if (w4 <= 0.0) return cap;
  const double n = std::log(1.0 - confidence) / std::log(1.0 - w4);
  if (!std::isfinite(n) || n >= cap) return cap;
  return std::max(1, static_cast<int>(std::ceil(n)));
}

int count_inliers(const Homography& h, const std::vector<Correspondence>& corr, double threshold,
                  std::vector<std::uint8_t>* flags) {
  if (!h.invertible()) return 0;
  const Homography inv = h.inverse();
  int n = 0;
  if (flags) flags->assign(corr.size(), 0);
  for (std::size_t i = 0; i < corr.size(); ++i) {
    const double e = symmetric_transfer_error(h, inv, corr[i].obs, corr[i].model);
    if (e < threshold) {
      ++n;
      if (flags) (*flags)[i] = 1;
    }
  }
  return n;
}

}  // namespace

const char* to_string(RegistrationError::Kind kind) {
  switch (kind) {
    case RegistrationError::Kind::too_few_matches: return "TooFewMatches";
    case RegistrationError::Kind::no_consensus: return "NoConsensus";
  }
  return "unknown";
}

Homography fit_homography(const std::vector<Eigen::Vector2d>& src, const std::vector<Eigen::Vector2d>& dst) {
  if (src.size() < 4 || src.size() != dst.size()) throw std::invalid_argument("fit_homography needs >= 4 pairs");
  const Eigen::Matrix3d ts = normalizer(src);
  const Eigen::Matrix3d td = normalizer(dst);
  const auto n = static_cast<Eigen::Index>(src.size());
  Eigen::MatrixXd a(2 * n, 9);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Vector3d s = ts * src[static_cast<std::size_t>(i)].homogeneous();
    const Eigen::Vector3d d = td * dst[static_cast<std::size_t>(i)].homogeneous();
    const double x = s.x() / s.z(), y = s.y() / s.z();
    const double u = d.x() / d.z(), v = d.y() / d.z();
    a.row(2 * i) << -x, -y, -1, 0, 0, 0, u * x, u * y, u;
    a.row(2 * i + 1) << 0, 0, 0, -x, -y, -1, v * x, v * y, v;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const Eigen::VectorXd h = svd.matrixV().col(8);
  Eigen::Matrix3d hn;
  hn << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);
  return Homography{td.inverse() * hn * ts}.normalized();
}

double symmetric_transfer_error(const Homography& h, const Homography& h_inv, const Eigen::Vector2d& src,
                                const Eigen::Vector2d& dst) {
  const double forward = (h.apply(src) - dst).norm();
  const double backward = (h_inv.apply(dst) - src).norm();
  const double e = 0.5 * (forward + backward);
  return std::isfinite(e) ? e : INFINITY;
}

RansacResult estimate_homography_ransac(const std::vector<Correspondence>& corr, const RansacConfig& cfg) {
  if (corr.size() < 4) {
    throw RegistrationError(RegistrationError::Kind::too_few_matches,
                            "need at least 4 correspondences, got " + std::to_string(corr.size()));
  }
  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<std::size_t> pick(0, corr.size() - 1);
  Homography best;
  int best_count = -1;
  int needed = cfg.max_iterations;
  int iterations = 0;
  int attempts = 0;
  const int max_attempts = 20 * cfg.max_iterations;
  std::vector<Eigen::Vector2d> s(4), d(4);
  while (iterations < needed && attempts < max_attempts) {
    ++attempts;
    std::size_t idx[4];
    for (int k = 0; k < 4; ++k) {
      bool fresh = false;
      while (!fresh) {
        idx[k] = pick(rng);
        fresh = std::find(idx, idx + k, idx[k]) == idx + k;
      }
      s[static_cast<std::size_t>(k)] = corr[idx[k]].obs;
      d[static_cast<std::size_t>(k)] = corr[idx[k]].model;
    }
    if (degenerate(s.data()) || degenerate(d.data())) continue;
    ++iterations;
    const Homography h = fit_homography(s, d);
    if (!h.invertible()) continue;
    const int n = count_inliers(h, corr, cfg.inlier_threshold, nullptr);
    if (n > best_count) {
      best_count = n;
      best = h;
      needed = std::min(needed, required_iterations(double(n) / double(corr.size()), cfg.confidence,
                                                    cfg.max_iterations));
    }
  }
  if (best_count < cfg.min_inliers) {
    throw RegistrationError(RegistrationError::Kind::no_consensus,
                            "best hypothesis has " + std::to_string(std::max(best_count, 0)) + " inliers, need " +
                                std::to_string(cfg.min_inliers));
  }

  RansacResult result;
  result.iterations = iterations;
  result.h = best;
  result.inlier_count = count_inliers(best, corr, cfg.inlier_threshold, &result.inliers);
  // Refit on the consensus set while it does not shrink.
  for (int round = 0; round < 4; ++round) {
    std::vector<Eigen::Vector2d> src, dst;
    for (std::size_t i = 0; i < corr.size(); ++i) {
      if (!result.inliers[i]) continue;
      src.push_back(corr[i].obs);
      dst.push_back(corr[i].model);
    }
    const Homography refit = fit_homography(src, dst);
    std::vector<std::uint8_t> flags;
    const int n = count_inliers(refit, corr, cfg.inlier_threshold, &flags);
    if (n < result.inlier_count) break;
    const bool same = flags == result.inliers;
    result.h = refit;
    result.inliers = std::move(flags);
    result.inlier_count = n;
    if (same) break;
  }
  return result;
}

}  // namespace prefine::registration
