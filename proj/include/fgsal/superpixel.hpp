#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <utility>
#include <vector>

#include "fgsal/error.hpp"
#include "fgsal/image.hpp"

namespace fgsal {

/// Per-pixel region labels forming the contiguous range 0..region_count-1.
/// Every region is 4-connected.
struct Segmentation {
  Image<std::int32_t> labels;
  int region_count = 0;
};

struct RegionStats {
  double mean_l = 0, mean_a = 0, mean_b = 0;
  double centroid_x = 0, centroid_y = 0;
  int pixel_count = 0;
};

namespace detail {

struct SlicSeed {
  double l, a, b, x, y;
};

// Squared Lab gradient used to nudge seeds off edges. Border pixels get a
// sentinel so seeds never move onto the frame.
inline Image<float> lab_edge_energy(const LabImage& img) {
  const int w = img.width(), h = img.height();
  Image<float> e(w, h, std::numeric_limits<float>::max());
  for (int y = 1; y + 1 < h; ++y) {
    for (int x = 1; x + 1 < w; ++x) {
      const LabPix& xl = img.at(x - 1, y);
      const LabPix& xr = img.at(x + 1, y);
      const LabPix& yu = img.at(x, y - 1);
      const LabPix& yd = img.at(x, y + 1);
      const double dx = (double(xr.l) - xl.l) * (double(xr.l) - xl.l) +
                        (double(xr.a) - xl.a) * (double(xr.a) - xl.a) +
                        (double(xr.b) - xl.b) * (double(xr.b) - xl.b);
      const double dy = (double(yd.l) - yu.l) * (double(yd.l) - yu.l) +
                        (double(yd.a) - yu.a) * (double(yd.a) - yu.a) +
                        (double(yd.b) - yu.b) * (double(yd.b) - yu.b);
      e.at(x, y) = static_cast<float>(dx + dy);
    }
  }
  return e;
}

inline std::vector<SlicSeed> init_seeds(const LabImage& img, double step) {
  const int w = img.width(), h = img.height();
  Image<float> edges = lab_edge_energy(img);

  std::vector<SlicSeed> seeds;
  for (double fy = step / 2.0; fy < h; fy += step) {
    for (double fx = step / 2.0; fx < w; fx += step) {
      int cx = std::clamp(static_cast<int>(std::lround(fx)), 0, w - 1);
      int cy = std::clamp(static_cast<int>(std::lround(fy)), 0, h - 1);

      // 3x3 perturbation toward the lowest-gradient neighbor.
      static constexpr int dx8[8] = {-1, 0, 1, -1, 1, -1, 0, 1};
      static constexpr int dy8[8] = {-1, -1, -1, 0, 0, 1, 1, 1};
      float best = edges.at(cx, cy);
      int bx = cx, by = cy;
      for (int i = 0; i < 8; ++i) {
        const int nx = cx + dx8[i], ny = cy + dy8[i];
        if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
        if (edges.at(nx, ny) < best) {
          best = edges.at(nx, ny);
          bx = nx;
          by = ny;
        }
      }

      const LabPix& p = img.at(bx, by);
      seeds.push_back({p.l, p.a, p.b, double(bx), double(by)});
    }
  }
  return seeds;
}

// Merge 4-connected components smaller than min_size into their largest
// adjacent component, then relabel by first occurrence in row-major order.
inline Segmentation enforce_connectivity(const Image<std::int32_t>& raw, int w, int h,
                                         int min_size) {
  Image<std::int32_t> comp(w, h, -1);
  std::vector<int> comp_size;

  // Flood fill per component.
  std::vector<std::pair<int, int>> stack;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (comp.at(x, y) != -1) continue;
      const int id = static_cast<int>(comp_size.size());
      const std::int32_t lbl = raw.at(x, y);
      int size = 0;
      stack.clear();
      stack.emplace_back(x, y);
      comp.at(x, y) = id;
      while (!stack.empty()) {
        auto [px, py] = stack.back();
        stack.pop_back();
        ++size;
        constexpr int dx4[4] = {1, -1, 0, 0};
        constexpr int dy4[4] = {0, 0, 1, -1};
        for (int i = 0; i < 4; ++i) {
          const int nx = px + dx4[i], ny = py + dy4[i];
          if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
          if (comp.at(nx, ny) != -1 || raw.at(nx, ny) != lbl) continue;
          comp.at(nx, ny) = id;
          stack.emplace_back(nx, ny);
        }
      }
      comp_size.push_back(size);
    }
  }

  const int m = static_cast<int>(comp_size.size());

  // Component adjacency from 4-neighbor pixel pairs.
  std::vector<std::vector<int>> adj(m);
  auto add_adj = [&](int a, int b) {
    if (a == b) return;
    if (std::find(adj[a].begin(), adj[a].end(), b) == adj[a].end()) adj[a].push_back(b);
    if (std::find(adj[b].begin(), adj[b].end(), a) == adj[b].end()) adj[b].push_back(a);
  };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (x + 1 < w) add_adj(comp.at(x, y), comp.at(x + 1, y));
      if (y + 1 < h) add_adj(comp.at(x, y), comp.at(x, y + 1));
    }
  }

  // Union-find over components; absorb undersized ones into their largest
  // live neighbor. Smallest component first keeps the order deterministic.
  std::vector<int> parent(m);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int v) {
    while (parent[v] != v) {
      parent[v] = parent[parent[v]];
      v = parent[v];
    }
    return v;
  };

  for (;;) {
    int victim = -1;
    for (int c = 0; c < m; ++c) {
      if (find(c) != c) continue;
      if (comp_size[c] >= min_size) continue;
      if (victim == -1 || comp_size[c] < comp_size[victim]) victim = c;
    }
    if (victim == -1) break;

    int target = -1;
    for (int n : adj[victim]) {
      const int root = find(n);
      if (root == victim) continue;
      if (target == -1 || comp_size[root] > comp_size[target] ||
          (comp_size[root] == comp_size[target] && root < target))
        target = root;
    }
    if (target == -1) break;  // single component left

    parent[victim] = target;
    comp_size[target] += comp_size[victim];
    for (int n : adj[victim]) {
      const int root = find(n);
      if (root != target &&
          std::find(adj[target].begin(), adj[target].end(), n) == adj[target].end())
        adj[target].push_back(n);
    }
  }

  // Relabel roots by first occurrence in row-major order.
  Segmentation seg;
  seg.labels = Image<std::int32_t>(w, h, -1);
  std::vector<int> remap(m, -1);
  int next = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int root = find(comp.at(x, y));
      if (remap[root] == -1) remap[root] = next++;
      seg.labels.at(x, y) = remap[root];
    }
  }
  seg.region_count = next;
  return seg;
}

}  // namespace detail

/// SLIC k-means over (L,a,b,x,y) with distance
///   D^2 = d_lab^2 + (compactness/S)^2 * d_xy^2,  S = sqrt(W*H/targetRegions),
/// run for 10 iterations from a perturbed regular seed grid, followed by
/// connectivity enforcement (components below S^2/4 absorbed into their
/// largest neighbor). The returned region count can differ from the target.
inline Segmentation slic_segment(const LabImage& img, int target_regions,
                                 double compactness) {
  const int w = img.width(), h = img.height();
  const long long n = static_cast<long long>(w) * h;
  if (compactness <= 0) throw ParamError("compactness must be positive");
  if (target_regions < 16 || static_cast<long long>(target_regions) > n / 16)
    throw ParamError("targetRegions outside [16, W*H/16]");

  const double step = std::sqrt(double(n) / target_regions);
  std::vector<detail::SlicSeed> seeds = detail::init_seeds(img, step);
  const int k = static_cast<int>(seeds.size());

  const double spatial_scale = compactness / step;
  const double ss2 = spatial_scale * spatial_scale;
  const int win = std::max(1, static_cast<int>(std::ceil(step)));

  Image<std::int32_t> labels(w, h, -1);
  std::vector<double> best(static_cast<std::size_t>(n));

  for (int iter = 0; iter < 10; ++iter) {
    std::fill(best.begin(), best.end(), std::numeric_limits<double>::max());
    std::fill(labels.begin(), labels.end(), -1);

    for (int s = 0; s < k; ++s) {
      const detail::SlicSeed& sd = seeds[s];
      const int x0 = std::max(0, static_cast<int>(std::floor(sd.x)) - win);
      const int x1 = std::min(w - 1, static_cast<int>(std::ceil(sd.x)) + win);
      const int y0 = std::max(0, static_cast<int>(std::floor(sd.y)) - win);
      const int y1 = std::min(h - 1, static_cast<int>(std::ceil(sd.y)) + win);
      for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
          const LabPix& p = img.at(x, y);
          const double dl = p.l - sd.l, da = p.a - sd.a, db = p.b - sd.b;
          const double dx = x - sd.x, dy = y - sd.y;
          const double d2 = dl * dl + da * da + db * db + ss2 * (dx * dx + dy * dy);
          const std::size_t i = static_cast<std::size_t>(y) * w + x;
          if (d2 < best[i]) {
            best[i] = d2;
            labels.at(x, y) = s;
          }
        }
      }
    }

    // Pixels outside every search window fall back to a full seed scan.
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        if (labels.at(x, y) != -1) continue;
        const LabPix& p = img.at(x, y);
        double bd = std::numeric_limits<double>::max();
        int bs = 0;
        for (int s = 0; s < k; ++s) {
          const detail::SlicSeed& sd = seeds[s];
          const double dl = p.l - sd.l, da = p.a - sd.a, db = p.b - sd.b;
          const double dx = x - sd.x, dy = y - sd.y;
          const double d2 = dl * dl + da * da + db * db + ss2 * (dx * dx + dy * dy);
          if (d2 < bd) {
            bd = d2;
            bs = s;
          }
        }
        labels.at(x, y) = bs;
      }
    }

    // Recenter seeds; empty clusters stay put.
    std::vector<detail::SlicSeed> acc(k, {0, 0, 0, 0, 0});
    std::vector<int> cnt(k, 0);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const int s = labels.at(x, y);
        const LabPix& p = img.at(x, y);
        acc[s].l += p.l;
        acc[s].a += p.a;
        acc[s].b += p.b;
        acc[s].x += x;
        acc[s].y += y;
        ++cnt[s];
      }
    }
    for (int s = 0; s < k; ++s) {
      if (cnt[s] == 0) continue;
      seeds[s] = {acc[s].l / cnt[s], acc[s].a / cnt[s], acc[s].b / cnt[s],
                  acc[s].x / cnt[s], acc[s].y / cnt[s]};
    }
  }

  const int min_size = std::max(1, static_cast<int>(step * step / 4.0));
  return detail::enforce_connectivity(labels, w, h, min_size);
}

/// Exact per-region mean Lab, centroid, and pixel count.
inline std::vector<RegionStats> region_stats(const LabImage& img, const Segmentation& seg) {
  if (!img.same_size(seg.labels))
    throw DimensionMismatch("segmentation does not match image dimensions");

  std::vector<RegionStats> stats(seg.region_count);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      RegionStats& r = stats[seg.labels.at(x, y)];
      const LabPix& p = img.at(x, y);
      r.mean_l += p.l;
      r.mean_a += p.a;
      r.mean_b += p.b;
      r.centroid_x += x;
      r.centroid_y += y;
      ++r.pixel_count;
    }
  }
  for (RegionStats& r : stats) {
    r.mean_l /= r.pixel_count;
    r.mean_a /= r.pixel_count;
    r.mean_b /= r.pixel_count;
    r.centroid_x /= r.pixel_count;
    r.centroid_y /= r.pixel_count;
  }
  return stats;
}

}  // namespace fgsal
