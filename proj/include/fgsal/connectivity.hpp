#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <utility>
#include <vector>

#include "fgsal/error.hpp"
#include "fgsal/image.hpp"
#include "fgsal/objectness.hpp"
#include "fgsal/parallel.hpp"
#include "fgsal/superpixel.hpp"

namespace fgsal {

/// Undirected region adjacency graph. Edge weights are Euclidean Lab
/// distances between region mean colors; boundary_flags marks regions
/// touching the image border.
struct RegionGraph {
  struct Edge {
    int a = 0, b = 0;
    double weight = 0;
  };
  int node_count = 0;
  std::vector<Edge> edges;             // sorted by (a,b), a < b, deduped
  std::vector<std::uint8_t> boundary_flags;
};

/// Builds the 4-adjacency graph of a segmentation. Deterministic: edges are
/// emitted sorted by (a,b) with a < b, one entry per region pair.
inline RegionGraph build_graph(const Segmentation& seg,
                               const std::vector<RegionStats>& stats) {
  const int n = seg.region_count;
  if (static_cast<int>(stats.size()) != n)
    throw DimensionMismatch("stats list does not match region count");

  const Image<std::int32_t>& lbl = seg.labels;
  const int w = lbl.width(), h = lbl.height();

  std::vector<std::pair<int, int>> pairs;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int a = lbl.at(x, y);
      if (x + 1 < w) {
        const int b = lbl.at(x + 1, y);
        if (a != b) pairs.emplace_back(std::min(a, b), std::max(a, b));
      }
      if (y + 1 < h) {
        const int b = lbl.at(x, y + 1);
        if (a != b) pairs.emplace_back(std::min(a, b), std::max(a, b));
      }
    }
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());

  RegionGraph g;
  g.node_count = n;
  g.edges.reserve(pairs.size());
  for (const auto& [a, b] : pairs) {
    const LabPix ca{static_cast<float>(stats[a].mean_l), static_cast<float>(stats[a].mean_a),
                    static_cast<float>(stats[a].mean_b)};
    const LabPix cb{static_cast<float>(stats[b].mean_l), static_cast<float>(stats[b].mean_a),
                    static_cast<float>(stats[b].mean_b)};
    g.edges.push_back({a, b, lab_distance(ca, cb)});
  }

  g.boundary_flags.assign(n, 0);
  for (int x = 0; x < w; ++x) {
    g.boundary_flags[lbl.at(x, 0)] = 1;
    g.boundary_flags[lbl.at(x, h - 1)] = 1;
  }
  for (int y = 0; y < h; ++y) {
    g.boundary_flags[lbl.at(0, y)] = 1;
    g.boundary_flags[lbl.at(w - 1, y)] = 1;
  }
  return g;
}

namespace detail {

inline std::vector<std::vector<std::pair<int, double>>> adjacency_lists(
    const RegionGraph& g) {
  std::vector<std::vector<std::pair<int, double>>> adj(g.node_count);
  for (const RegionGraph::Edge& e : g.edges) {
    if (e.a < 0 || e.b < 0 || e.a >= g.node_count || e.b >= g.node_count)
      throw BoundsError("edge endpoint outside node range");
    if (e.weight < 0) throw ParamError("edge weights must be non-negative");
    adj[e.a].emplace_back(e.b, e.weight);
    adj[e.b].emplace_back(e.a, e.weight);
  }
  return adj;
}

inline std::vector<double> dijkstra(
    const std::vector<std::vector<std::pair<int, double>>>& adj, int source) {
  const int n = static_cast<int>(adj.size());
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  dist[source] = 0;

  using Item = std::pair<double, int>;  // (distance, node)
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
  pq.emplace(0.0, source);
  while (!pq.empty()) {
    const auto [d, u] = pq.top();
    pq.pop();
    if (d > dist[u]) continue;
    for (const auto& [v, w] : adj[u]) {
      const double nd = d + w;
      if (nd < dist[v]) {
        dist[v] = nd;
        pq.emplace(nd, v);
      }
    }
  }
  return dist;
}

}  // namespace detail

/// Geodesic (shortest-path) distances from one region to all others.
/// Unreachable regions get +infinity.
inline std::vector<double> shortest_distances(const RegionGraph& g, int source) {
  if (source < 0 || source >= g.node_count)
    throw BoundsError("source node outside graph");
  return detail::dijkstra(detail::adjacency_lists(g), source);
}

/// Full geodesic distance matrix, row i = distances from region i. Rows may
/// be computed in parallel; the result does not depend on thread count.
inline std::vector<std::vector<double>> all_pairs_distances(const RegionGraph& g,
                                                            int threads = 1) {
  const auto adj = detail::adjacency_lists(g);
  std::vector<std::vector<double>> dist(g.node_count);
  parallel_for(g.node_count, threads,
               [&](int i) { dist[i] = detail::dijkstra(adj, i); });
  return dist;
}

/// Foreground connectivity of each region: the geodesic mass of foreground
/// regions around it divided by the geodesic mass of background regions,
///   FG(R) = sum_k d(R,R_k) delta_k / max(sum_k d(R,R_k) (1 - delta_k), eps).
/// High values mean the region sits far from everything labelled background.
inline std::vector<double> foreground_connectivity(
    const RegionGraph& g, const std::vector<std::uint8_t>& is_foreground,
    const std::vector<std::vector<double>>& dist, double epsilon = 1e-6) {
  const int n = g.node_count;
  if (static_cast<int>(is_foreground.size()) != n ||
      static_cast<int>(dist.size()) != n)
    throw DimensionMismatch("mask or distance matrix does not match graph");
  if (epsilon <= 0) throw ParamError("epsilon must be positive");

  const bool any_fg = std::find(is_foreground.begin(), is_foreground.end(), 1) !=
                      is_foreground.end();
  const bool any_bg = std::find(is_foreground.begin(), is_foreground.end(),
                                std::uint8_t{0}) != is_foreground.end();
  if (!any_fg || !any_bg)
    throw DegenerateMask("foreground mask must contain both labels");

  std::vector<double> fg(n);
  for (int i = 0; i < n; ++i) {
    double num = 0, den = 0;
    for (int k = 0; k < n; ++k) {
      if (k == i) continue;
      if (is_foreground[k])
        num += dist[i][k];
      else
        den += dist[i][k];
    }
    fg[i] = num / std::max(den, epsilon);
  }
  return fg;
}

/// Foreground weights: reciprocal of FG, normalized so the largest weight is
/// 1. Regions strongly connected to the estimated foreground get weight near
/// 1, and regions far from it get weight near 0.
inline std::vector<double> foreground_weights(const std::vector<double>& fg,
                                              double epsilon = 1e-6) {
  if (epsilon <= 0) throw ParamError("epsilon must be positive");
  std::vector<double> w(fg.size());
  double max_w = 0;
  for (std::size_t i = 0; i < fg.size(); ++i) {
    if (fg[i] < 0) throw ParamError("connectivity values must be non-negative");
    w[i] = 1.0 / (fg[i] + epsilon);
    max_w = std::max(max_w, w[i]);
  }
  if (max_w > 0)
    for (double& v : w) v /= max_w;
  return w;
}

/// Background weights via boundary connectivity: a region's soft area is the
/// sum of exp(-d_geo^2 / 2 sigma_clr^2) over all regions, its boundary
/// length the same sum over border regions, and
///   wBg = 1 - exp(-BndCon^2 / 2 sigma_b^2),  BndCon = Len / sqrt(Area).
inline std::vector<double> background_weights(
    const RegionGraph& g, const std::vector<std::vector<double>>& dist,
    double sigma_clr = 10.0, double sigma_bndcon = 1.0) {
  const int n = g.node_count;
  if (static_cast<int>(dist.size()) != n)
    throw DimensionMismatch("distance matrix does not match graph");
  if (sigma_clr <= 0 || sigma_bndcon <= 0)
    throw ParamError("sigma parameters must be positive");

  const double inv_2s2 = 1.0 / (2.0 * sigma_clr * sigma_clr);
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) {
    double area = 0, len = 0;
    for (int k = 0; k < n; ++k) {
      const double a = std::exp(-dist[i][k] * dist[i][k] * inv_2s2);
      area += a;
      if (g.boundary_flags[k]) len += a;
    }
    const double bndcon = len / std::sqrt(area);  // area >= 1 (self term)
    w[i] = 1.0 - std::exp(-bndcon * bndcon / (2.0 * sigma_bndcon * sigma_bndcon));
  }
  return w;
}

/// Smoothness weight per graph edge: exp(-w^2 / 2 sigma_clr^2) + mu, where w
/// is the edge's Lab distance. mu keeps a floor so even strong color edges
/// retain a little coupling.
inline std::vector<double> smoothness_weights(const RegionGraph& g,
                                              double sigma_clr = 10.0,
                                              double mu = 0.1) {
  if (sigma_clr <= 0) throw ParamError("sigmaClr must be positive");
  if (mu < 0) throw ParamError("mu must be non-negative");
  std::vector<double> w(g.edges.size());
  const double inv_2s2 = 1.0 / (2.0 * sigma_clr * sigma_clr);
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    const double d = g.edges[i].weight;
    w[i] = std::exp(-d * d * inv_2s2) + mu;
  }
  return w;
}

/// The three weight sets feeding the quadratic label solve.
struct WeightVectors {
  std::vector<double> foreground;  // per region
  std::vector<double> background;  // per region
  std::vector<double> smoothness;  // per graph edge
};

}  // namespace fgsal
