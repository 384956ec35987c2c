#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "fgsal/error.hpp"
#include "fgsal/image.hpp"
#include "fgsal/parallel.hpp"
#include "fgsal/superpixel.hpp"

namespace fgsal {

/// 8x8 zero-sum scoring filter applied to normed-gradient patches.
struct ScoringFilter {
  std::array<std::array<double, 8>, 8> weights{};  // [row][col]
};

struct WindowSize {
  int w = 0, h = 0;
};

inline bool operator==(WindowSize a, WindowSize b) { return a.w == b.w && a.h == b.h; }

/// Scored candidate window in original-image pixel coordinates.
struct ProposalWindow {
  int x = 0, y = 0, w = 0, h = 0;
  double score = 0;
  int size_index = 0;
};

using ProposalSet = std::vector<ProposalWindow>;

/// Per-region foreground estimate: delta flags plus the raw region
/// objectness scores the threshold ran on.
struct ForegroundMask {
  std::vector<std::uint8_t> is_foreground;
  std::vector<double> region_objectness;
};

/// Negated Laplacian-of-Gaussian sampled on the 8x8 grid centered at
/// (3.5, 3.5), mean-subtracted to exact zero sum. Center weights are
/// positive, the outer ring negative, so a patch with gradient energy
/// concentrated at its center scores high.
inline ScoringFilter make_log_filter(double sigma) {
  if (sigma <= 0) throw ParamError("sigma must be positive");

  ScoringFilter f;
  const double s2 = sigma * sigma;
  double sum = 0;
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 8; ++x) {
      const double dx = x - 3.5, dy = y - 3.5;
      const double r2 = dx * dx + dy * dy;
      const double log_val = (r2 - 2.0 * s2) / (s2 * s2) * std::exp(-r2 / (2.0 * s2));
      f.weights[y][x] = -log_val;
      sum += f.weights[y][x];
    }
  }
  const double mean = sum / 64.0;
  for (auto& row : f.weights)
    for (double& w : row) w -= mean;
  return f;
}

/// The quantized window sizes scored by default: all (w,h) combinations of
/// {16,32,64,128,256,512} clipped to the image, duplicates removed.
inline std::vector<WindowSize> quantized_window_sizes(int img_w, int img_h) {
  static constexpr int kBase[6] = {16, 32, 64, 128, 256, 512};
  std::vector<WindowSize> sizes;
  for (int bh : kBase) {
    for (int bw : kBase) {
      const WindowSize s{std::min(bw, img_w), std::min(bh, img_h)};
      if (std::find(sizes.begin(), sizes.end(), s) == sizes.end()) sizes.push_back(s);
    }
  }
  return sizes;
}

/// Scores every stride-1 window of every quantized size: the gradient map is
/// resampled so an 8x8 patch spans one window, each patch is scored by inner
/// product with the filter, and windows are mapped back to original
/// coordinates. No learned re-ranking. Sizes may be scored in parallel;
/// results are concatenated in size order either way.
inline std::vector<ProposalWindow> score_windows(const NormedGradientMap& ng,
                                                 const ScoringFilter& filter,
                                                 const std::vector<WindowSize>& sizes,
                                                 int threads = 1) {
  if (sizes.empty()) throw ParamError("size list must be nonempty");
  for (const WindowSize& s : sizes)
    if (s.w < 8 || s.h < 8) throw ParamError("window sizes must be at least 8x8");

  const int w = ng.width(), h = ng.height();
  std::vector<std::vector<ProposalWindow>> per_size(sizes.size());

  parallel_for(static_cast<int>(sizes.size()), threads, [&](int si) {
    const WindowSize size = sizes[si];
    const int rw = std::max(8, static_cast<int>(std::lround(8.0 * w / size.w)));
    const int rh = std::max(8, static_cast<int>(std::lround(8.0 * h / size.h)));
    const Image<float> resized = resize_bilinear(ng, rw, rh);
    const double ratio_x = double(w) / rw;
    const double ratio_y = double(h) / rh;

    std::vector<ProposalWindow>& out = per_size[si];
    out.reserve(static_cast<std::size_t>(rw - 7) * (rh - 7));
    for (int yr = 0; yr + 8 <= rh; ++yr) {
      for (int xr = 0; xr + 8 <= rw; ++xr) {
        double s = 0;
        for (int dy = 0; dy < 8; ++dy)
          for (int dx = 0; dx < 8; ++dx)
            s += filter.weights[dy][dx] * resized.at(xr + dx, yr + dy);

        const int x0 = std::min(static_cast<int>(std::lround(xr * ratio_x)), w - 8);
        const int y0 = std::min(static_cast<int>(std::lround(yr * ratio_y)), h - 8);
        out.push_back({x0, y0, std::min(size.w, w - x0), std::min(size.h, h - y0), s, si});
      }
    }
  });

  std::vector<ProposalWindow> all;
  std::size_t total = 0;
  for (const auto& v : per_size) total += v.size();
  all.reserve(total);
  for (const auto& v : per_size) all.insert(all.end(), v.begin(), v.end());
  return all;
}

inline double rect_iou(const ProposalWindow& a, const ProposalWindow& b) {
  const int ix0 = std::max(a.x, b.x);
  const int iy0 = std::max(a.y, b.y);
  const int ix1 = std::min(a.x + a.w, b.x + b.w);
  const int iy1 = std::min(a.y + a.h, b.y + b.h);
  const double inter =
      double(std::max(0, ix1 - ix0)) * double(std::max(0, iy1 - iy0));
  const double uni = double(a.w) * a.h + double(b.w) * b.h - inter;
  return uni > 0 ? inter / uni : 0.0;
}

/// Greedy score-descending NMS. A window survives iff its IoU with every
/// previously kept window is below iou_threshold; selection stops at k.
/// Ties break on (smaller size_index, smaller y, smaller x).
inline ProposalSet nms_select(std::vector<ProposalWindow> proposals, int k,
                              double iou_threshold) {
  if (k < 1) throw ParamError("k must be at least 1");
  if (!(iou_threshold > 0.0 && iou_threshold < 1.0))
    throw ParamError("iouThreshold must lie in (0,1)");

  std::sort(proposals.begin(), proposals.end(),
            [](const ProposalWindow& a, const ProposalWindow& b) {
              if (a.score != b.score) return a.score > b.score;
              if (a.size_index != b.size_index) return a.size_index < b.size_index;
              if (a.y != b.y) return a.y < b.y;
              return a.x < b.x;
            });

  ProposalSet kept;
  for (const ProposalWindow& cand : proposals) {
    if (static_cast<int>(kept.size()) >= k) break;
    bool suppressed = false;
    for (const ProposalWindow& kw : kept) {
      if (rect_iou(cand, kw) >= iou_threshold) {
        suppressed = true;
        break;
      }
    }
    if (!suppressed) kept.push_back(cand);
  }
  return kept;
}

/// Accumulates score-weighted separable Gaussians over each proposal's own
/// coordinate frame: sigma = extent/spread_divisor per axis, amplitude 1 at
/// the window center. Negative scores are clamped to zero so the map stays
/// non-negative.
inline PixelObjectnessMap pixel_objectness(const ProposalSet& proposals, int width,
                                           int height, double spread_divisor = 4.0) {
  if (spread_divisor <= 0) throw ParamError("spread divisor must be positive");
  PixelObjectnessMap map(width, height, 0.0);

  std::vector<double> gx, gy;
  for (const ProposalWindow& p : proposals) {
    if (p.x < 0 || p.y < 0 || p.w < 1 || p.h < 1 || p.x + p.w > width ||
        p.y + p.h > height)
      throw BoundsError("proposal outside image bounds");

    const double s = std::max(0.0, p.score);
    if (s == 0.0) continue;

    const double sx = p.w / spread_divisor;
    const double sy = p.h / spread_divisor;
    const double cx = (p.w - 1) / 2.0;
    const double cy = (p.h - 1) / 2.0;

    gx.resize(p.w);
    gy.resize(p.h);
    for (int dx = 0; dx < p.w; ++dx)
      gx[dx] = std::exp(-(dx - cx) * (dx - cx) / (2.0 * sx * sx));
    for (int dy = 0; dy < p.h; ++dy)
      gy[dy] = std::exp(-(dy - cy) * (dy - cy) / (2.0 * sy * sy));

    for (int dy = 0; dy < p.h; ++dy) {
      const double row = s * gy[dy];
      double* out = &map.at(p.x, p.y + dy);
      for (int dx = 0; dx < p.w; ++dx) out[dx] += row * gx[dx];
    }
  }
  return map;
}

/// Exact per-region sum of the pixel objectness map.
inline std::vector<double> region_objectness(const PixelObjectnessMap& pix,
                                             const Segmentation& seg) {
  if (!pix.same_size(seg.labels))
    throw DimensionMismatch("objectness map does not match segmentation");
  std::vector<double> sums(seg.region_count, 0.0);
  for (int y = 0; y < pix.height(); ++y)
    for (int x = 0; x < pix.width(); ++x) sums[seg.labels.at(x, y)] += pix.at(x, y);
  return sums;
}

/// Otsu threshold over the region scores (normalized to mean objectness per
/// pixel when area_normalize is set, which keeps large background regions
/// from dominating the raw sums). Implemented as an exhaustive search for
/// the split maximizing between-class variance; throws DegenerateForeground
/// when no realizable split exists (all values equal).
inline ForegroundMask adaptive_threshold(const std::vector<double>& region_scores,
                                         const Segmentation& seg,
                                         bool area_normalize = true) {
  const int n = seg.region_count;
  if (static_cast<int>(region_scores.size()) != n)
    throw DimensionMismatch("score list does not match region count");
  if (n < 2) throw ParamError("need at least 2 regions to threshold");

  std::vector<int> counts(n, 0);
  for (const std::int32_t lbl : seg.labels) ++counts[lbl];

  std::vector<double> vals(n);
  for (int i = 0; i < n; ++i)
    vals[i] = area_normalize ? region_scores[i] / counts[i] : region_scores[i];

  std::vector<double> sorted = vals;
  std::sort(sorted.begin(), sorted.end());

  std::vector<double> prefix(n + 1, 0.0);
  for (int i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + sorted[i];

  int best_split = -1;
  double best_var = -1.0;
  for (int p = 1; p < n; ++p) {
    if (sorted[p - 1] == sorted[p]) continue;  // no threshold separates here
    const double n0 = p, n1 = n - p;
    const double mu0 = prefix[p] / n0;
    const double mu1 = (prefix[n] - prefix[p]) / n1;
    const double var = n0 * n1 * (mu0 - mu1) * (mu0 - mu1);
    if (var > best_var) {
      best_var = var;
      best_split = p;
    }
  }
  if (best_split == -1)
    throw DegenerateForeground("all region scores fall on one side of every threshold");

  const double threshold = sorted[best_split - 1];
  ForegroundMask mask;
  mask.region_objectness = region_scores;
  mask.is_foreground.resize(n);
  for (int i = 0; i < n; ++i) mask.is_foreground[i] = vals[i] > threshold ? 1 : 0;
  return mask;
}

}  // namespace fgsal
