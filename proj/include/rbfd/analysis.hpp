#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "rbfd/matrix.hpp"

namespace rbfd {

// ---------------------------------------------------------------------------
// Edge prediction by thresholding

struct RocPoint {
  double threshold = 0.0;  // predict an edge when score >= threshold
  double fpr = 0.0;
  double tpr = 0.0;
};

struct RocCurve {
  std::vector<RocPoint> points;
  double auc = 0.0;
};

/// ROC of `approx` as a score for the edges of `adjacency`. Each unordered
/// off-diagonal pair is scored once; tied scores enter the curve together.
inline RocCurve edge_prediction_roc(const DenseMatrix& adjacency, const DenseMatrix& approx) {
  if (adjacency.rows() != approx.rows() || adjacency.cols() != approx.cols())
    throw std::invalid_argument("edge_prediction_roc: dimension mismatch");
  if (!adjacency.square()) throw std::invalid_argument("edge_prediction_roc: adjacency must be square");
  const std::size_t n = adjacency.rows();
  for (double x : adjacency.values())
    if (x != 0.0 && x != 1.0) throw std::invalid_argument("edge_prediction_roc: adjacency must be 0/1");
  if (!adjacency.is_symmetric())
    throw std::invalid_argument("edge_prediction_roc: adjacency must be symmetric");

  struct Scored {
    double score;
    bool edge;
  };
  std::vector<Scored> items;
  items.reserve(n * (n - 1) / 2);
  std::size_t positives = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool edge = adjacency(i, j) == 1.0;
      positives += edge;
      items.push_back({approx(i, j), edge});
    }
  const std::size_t negatives = items.size() - positives;
  if (positives == 0 || negatives == 0)
    throw std::invalid_argument("edge_prediction_roc: need both edges and non-edges");

  std::sort(items.begin(), items.end(),
            [](const Scored& x, const Scored& y) { return x.score > y.score; });

  RocCurve roc;
  roc.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
  std::size_t tp = 0, fp = 0;
  for (std::size_t s = 0; s < items.size();) {
    const double threshold = items[s].score;
    for (; s < items.size() && items[s].score == threshold; ++s) (items[s].edge ? tp : fp)++;
    roc.points.push_back({threshold, static_cast<double>(fp) / static_cast<double>(negatives),
                          static_cast<double>(tp) / static_cast<double>(positives)});
  }
  for (std::size_t p = 1; p < roc.points.size(); ++p) {
    const auto& lo = roc.points[p - 1];
    const auto& hi = roc.points[p];
    roc.auc += (hi.fpr - lo.fpr) * 0.5 * (hi.tpr + lo.tpr);
  }
  return roc;
}

// ---------------------------------------------------------------------------
// One-dimensional clustering and community scoring

/// Splits sorted values at the k-1 widest consecutive gaps. Cluster ids follow
/// sorted-value order; equal gaps prefer the lower sorted position.
inline std::vector<int> cluster_1d(const std::vector<double>& values, std::size_t k) {
  const std::size_t n = values.size();
  if (k < 1 || k > n) throw std::invalid_argument("cluster_1d: need 1 <= k <= n");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return values[x] < values[y]; });

  std::vector<std::size_t> gaps(n - 1);  // gap p lies between sorted positions p and p+1
  std::iota(gaps.begin(), gaps.end(), std::size_t{0});
  auto width = [&](std::size_t p) { return values[order[p + 1]] - values[order[p]]; };
  std::stable_sort(gaps.begin(), gaps.end(),
                   [&](std::size_t x, std::size_t y) { return width(x) > width(y); });
  std::vector<bool> cut(n, false);
  for (std::size_t c = 0; c + 1 < k; ++c) cut[gaps[c]] = true;

  std::vector<int> labels(n);
  int current = 0;
  for (std::size_t p = 0; p < n; ++p) {
    labels[order[p]] = current;
    if (p + 1 < n && cut[p]) ++current;
  }
  return labels;
}

namespace detail {

inline std::vector<std::size_t> compact_labels(const std::vector<int>& labels, std::size_t& count) {
  std::map<int, std::size_t> ids;
  for (int l : labels) ids.emplace(l, 0);
  std::size_t next = 0;
  for (auto& [label, id] : ids) id = next++;
  count = ids.size();
  std::vector<std::size_t> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) out[i] = ids.at(labels[i]);
  return out;
}

}  // namespace detail

/// Fraction of items whose label agrees with the ground truth under the best
/// one-to-one renaming of labels.
inline double community_accuracy(const std::vector<int>& labels, const std::vector<int>& truth) {
  if (labels.size() != truth.size()) throw std::invalid_argument("community_accuracy: length mismatch");
  if (labels.empty()) throw std::invalid_argument("community_accuracy: empty labeling");
  std::size_t ka = 0, kb = 0;
  const auto a = detail::compact_labels(labels, ka);
  const auto b = detail::compact_labels(truth, kb);
  if (ka != kb)
    throw std::invalid_argument("community_accuracy: labelings have " + std::to_string(ka) + " and " +
                                std::to_string(kb) + " distinct labels");
  if (ka > 9) throw std::invalid_argument("community_accuracy: at most 9 labels supported");

  std::vector<std::size_t> confusion(ka * ka, 0);
  for (std::size_t i = 0; i < a.size(); ++i) ++confusion[a[i] * ka + b[i]];
  std::vector<std::size_t> perm(ka);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::size_t best = 0;
  do {
    std::size_t hits = 0;
    for (std::size_t c = 0; c < ka; ++c) hits += confusion[c * ka + perm[c]];
    best = std::max(best, hits);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(best) / static_cast<double>(a.size());
}

inline double pearson_correlation(const std::vector<double>& u, const std::vector<double>& t) {
  if (u.size() != t.size()) throw std::invalid_argument("pearson_correlation: length mismatch");
  if (u.size() < 2) throw std::invalid_argument("pearson_correlation: need at least 2 values");
  const double n = static_cast<double>(u.size());
  const double mu = std::accumulate(u.begin(), u.end(), 0.0) / n;
  const double mt = std::accumulate(t.begin(), t.end(), 0.0) / n;
  double suu = 0.0, stt = 0.0, sut = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double du = u[i] - mu, dt = t[i] - mt;
    suu += du * du;
    stt += dt * dt;
    sut += du * dt;
  }
  if (suu == 0.0 || stt == 0.0) throw std::invalid_argument("pearson_correlation: zero variance");
  return std::clamp(sut / std::sqrt(suu * stt), -1.0, 1.0);
}

// ---------------------------------------------------------------------------
// Grayscale images

class GrayImage {
 public:
  GrayImage() = default;
  GrayImage(std::size_t width, std::size_t height, std::vector<double> pixels)
      : width_(width), height_(height), pixels_(std::move(pixels)) {
    if (width_ == 0 || height_ == 0) throw std::invalid_argument("GrayImage: empty image");
    if (pixels_.size() != width_ * height_)
      throw std::invalid_argument("GrayImage: pixel count does not match width*height");
    for (double& p : pixels_) p = std::isnan(p) ? 0.0 : std::clamp(p, 0.0, 1.0);
  }

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  double operator()(std::size_t x, std::size_t y) const noexcept { return pixels_[y * width_ + x]; }
  const std::vector<double>& pixels() const noexcept { return pixels_; }

  /// Top-left crop of at most max_width x max_height pixels.
  GrayImage crop(std::size_t max_width, std::size_t max_height) const {
    const std::size_t w = std::min(width_, max_width), h = std::min(height_, max_height);
    std::vector<double> px(w * h);
    for (std::size_t y = 0; y < h; ++y)
      for (std::size_t x = 0; x < w; ++x) px[y * w + x] = (*this)(x, y);
    return GrayImage(w, h, std::move(px));
  }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<double> pixels_;
};

inline double luminance(double r, double g, double b) noexcept { return 0.299 * r + 0.587 * g + 0.114 * b; }

/// Image rows become matrix rows.
inline DenseMatrix image_to_matrix(const GrayImage& image) {
  return DenseMatrix(image.height(), image.width(), image.pixels());
}

inline GrayImage matrix_to_image(const DenseMatrix& matrix) {
  auto v = matrix.values();
  return GrayImage(matrix.cols(), matrix.rows(), std::vector<double>(v.begin(), v.end()));
}

}  // namespace rbfd
