#pragma once

#include <algorithm>
#include <iostream>
#include <vector>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "fgsal/connectivity.hpp"
#include "fgsal/error.hpp"
#include "fgsal/image.hpp"
#include "fgsal/superpixel.hpp"

namespace fgsal {

/// Unclamped minimizer of the saliency energy
///   sum_i wFg_i (t_i - 1)^2 + sum_i wBg_i t_i^2 + sum_ij w_ij (t_i - t_j)^2.
/// Setting the gradient to zero gives the SPD system
///   (diag(wFg) + diag(wBg) + L) t = wFg
/// with L the weighted graph Laplacian, solved by sparse Cholesky (CG
/// fallback for large graphs). If every unary weight is zero the system is
/// singular; a warning goes to stderr and the neutral 0.5 labeling is
/// returned.
inline std::vector<double> solve_saliency_raw(const RegionGraph& g,
                                              const WeightVectors& w) {
  const int n = g.node_count;
  if (static_cast<int>(w.foreground.size()) != n ||
      static_cast<int>(w.background.size()) != n)
    throw DimensionMismatch("unary weight vectors do not match node count");
  if (w.smoothness.size() != g.edges.size())
    throw DimensionMismatch("smoothness vector does not match edge count");
  for (int i = 0; i < n; ++i)
    if (w.foreground[i] < 0 || w.background[i] < 0)
      throw ParamError("unary weights must be non-negative");
  for (const double s : w.smoothness)
    if (s < 0) throw ParamError("smoothness weights must be non-negative");

  double unary_sum = 0;
  for (int i = 0; i < n; ++i) unary_sum += w.foreground[i] + w.background[i];
  if (unary_sum == 0) {
    std::cerr << "warning: all unary weights zero, returning neutral labels\n";
    return std::vector<double>(n, 0.5);
  }

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(n + 4 * g.edges.size());
  std::vector<double> diag(n);
  for (int i = 0; i < n; ++i) diag[i] = w.foreground[i] + w.background[i];
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const int a = g.edges[e].a, b = g.edges[e].b;
    const double s = w.smoothness[e];
    diag[a] += s;
    diag[b] += s;
    trip.emplace_back(a, b, -s);
    trip.emplace_back(b, a, -s);
  }
  for (int i = 0; i < n; ++i) trip.emplace_back(i, i, diag[i]);

  Eigen::SparseMatrix<double> A(n, n);
  A.setFromTriplets(trip.begin(), trip.end());
  Eigen::VectorXd rhs(n);
  for (int i = 0; i < n; ++i) rhs(i) = w.foreground[i];

  Eigen::VectorXd t;
  bool solved = false;
  if (n <= 2000) {
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(A);
    if (llt.info() == Eigen::Success) {
      t = llt.solve(rhs);
      solved = llt.info() == Eigen::Success;
    }
  }
  if (!solved) {
    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>,
                             Eigen::Lower | Eigen::Upper>
        cg(A);
    cg.setTolerance(1e-10);
    cg.setMaxIterations(10 * static_cast<Eigen::Index>(n));
    t = cg.solve(rhs);
  }

  return std::vector<double>(t.data(), t.data() + n);
}

/// Clamped labels in [0,1] — the raw minimizer already lies inside by the
/// maximum principle, so clamping only trims floating-point spill.
inline std::vector<double> solve_saliency(const RegionGraph& g,
                                          const WeightVectors& w) {
  std::vector<double> t = solve_saliency_raw(g, w);
  for (double& v : t) v = std::clamp(v, 0.0, 1.0);
  return t;
}

/// Evaluates the saliency energy at an arbitrary labeling (used to check
/// optimality of the solve).
inline double saliency_cost(const RegionGraph& g, const WeightVectors& w,
                            const std::vector<double>& t) {
  if (static_cast<int>(t.size()) != g.node_count)
    throw DimensionMismatch("labeling does not match node count");
  double cost = 0;
  for (int i = 0; i < g.node_count; ++i) {
    cost += w.foreground[i] * (t[i] - 1.0) * (t[i] - 1.0);
    cost += w.background[i] * t[i] * t[i];
  }
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const double d = t[g.edges[e].a] - t[g.edges[e].b];
    cost += w.smoothness[e] * d * d;
  }
  return cost;
}

/// Paints per-region labels back onto pixels. With normalize set the output
/// is min-max stretched to [0,1] (constant maps collapse to 0).
inline SaliencyMap render_map(const std::vector<double>& t, const Segmentation& seg,
                              bool normalize = true) {
  if (static_cast<int>(t.size()) != seg.region_count)
    throw DimensionMismatch("labeling does not match region count");

  std::vector<float> vals(t.begin(), t.end());
  if (normalize) {
    const auto [lo_it, hi_it] = std::minmax_element(t.begin(), t.end());
    const double lo = *lo_it, hi = *hi_it;
    if (hi > lo)
      for (std::size_t i = 0; i < t.size(); ++i)
        vals[i] = static_cast<float>((t[i] - lo) / (hi - lo));
    else
      std::fill(vals.begin(), vals.end(), 0.0f);
  }

  SaliencyMap map(seg.labels.width(), seg.labels.height());
  for (int y = 0; y < map.height(); ++y)
    for (int x = 0; x < map.width(); ++x) map.at(x, y) = vals[seg.labels.at(x, y)];
  return map;
}

}  // namespace fgsal
