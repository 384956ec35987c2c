#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "fgsal/error.hpp"
#include "fgsal/image.hpp"

namespace fgsal {

/// Mean absolute error between a saliency map and a binary ground truth:
///   MAE = (1 / WH) sum_xy | S(x,y) - G(x,y) |.
inline double mae(const SaliencyMap& map, const GroundTruthMask& gt) {
  if (!map.same_size(gt))
    throw DimensionMismatch("saliency map and ground truth differ in size");
  double sum = 0;
  const int w = map.width(), h = map.height();
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) sum += std::abs(double(map.at(x, y)) - gt.at(x, y));
  return sum / (double(w) * h);
}

/// Precision/recall at every integer threshold t in 0..255, where the map is
/// binarized as 255*S > t. precision[t] is 1 when the binarization is empty.
struct PrCurve {
  std::array<double, 256> precision{};
  std::array<double, 256> recall{};
};

/// Exact PR curve via a histogram sweep: a pixel with c = ceil(255*S) passes
/// threshold t iff c > t, so suffix sums of the histogram of c give the
/// positive counts for all 256 thresholds in one pass over the image.
inline PrCurve pr_curve(const SaliencyMap& map, const GroundTruthMask& gt) {
  if (!map.same_size(gt))
    throw DimensionMismatch("saliency map and ground truth differ in size");

  std::int64_t gt_total = 0;
  for (const std::uint8_t g : gt) gt_total += g;
  if (gt_total == 0) throw EmptyGroundTruth("ground truth mask has no foreground");

  // hist[c] = pixels with ceil(255*S) == c, split by ground-truth label.
  std::array<std::int64_t, 257> hist_all{}, hist_fg{};
  const int w = map.width(), h = map.height();
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double v = std::clamp(double(map.at(x, y)), 0.0, 1.0);
      const int c = std::clamp(static_cast<int>(std::ceil(255.0 * v)), 0, 256);
      ++hist_all[c];
      if (gt.at(x, y)) ++hist_fg[c];
    }
  }

  PrCurve curve;
  std::int64_t pos = 0, tp = 0;  // pixels with c > t, accumulated from above
  for (int t = 255; t >= 0; --t) {
    pos += hist_all[t + 1];
    tp += hist_fg[t + 1];
    curve.precision[t] = pos > 0 ? double(tp) / pos : 1.0;
    curve.recall[t] = double(tp) / gt_total;
  }
  return curve;
}

/// Per-image evaluation record.
struct ImageMetrics {
  std::string name;
  double mae = 0;
  PrCurve pr;
};

/// Dataset-level aggregate: unweighted means of the per-image numbers.
struct DatasetReport {
  double mean_mae = 0;
  PrCurve mean_pr;
  std::vector<ImageMetrics> images;
};

inline DatasetReport aggregate(std::vector<ImageMetrics> images) {
  if (images.empty()) throw ParamError("cannot aggregate zero images");
  DatasetReport report;
  const double inv = 1.0 / images.size();
  for (const ImageMetrics& m : images) {
    report.mean_mae += m.mae * inv;
    for (int t = 0; t < 256; ++t) {
      report.mean_pr.precision[t] += m.pr.precision[t] * inv;
      report.mean_pr.recall[t] += m.pr.recall[t] * inv;
    }
  }
  report.images = std::move(images);
  return report;
}

}  // namespace fgsal
