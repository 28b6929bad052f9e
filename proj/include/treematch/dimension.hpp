#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "treematch/metric.hpp"
#include "treematch/tree.hpp"

namespace treematch {

enum class DimMode { Exhaustive, Greedy };

// Subset maximization result; exact is false for greedy lower bounds.
struct DimValue {
  double value = 0.0;
  bool exact = false;
};

// Largest matching number over size-k sub-multisets. Exhaustive mode walks
// every combination with repetition and is exact but capped; greedy mode
// restarts farthest-point sampling from seeded starts and reports a lower
// bound. k must be even.
DimValue m_k(const FiniteMetric& m, int k, DimMode mode = DimMode::Exhaustive,
             std::uint64_t seed = 0);

// Largest matching number over eps-separated even subsets; an empty supremum
// is 0. Exhaustive enumeration up to 16 points; otherwise, or on request,
// greedy maximal separated subsets from seeded scan orders.
DimValue m_eps(const FiniteMetric& m, double eps,
               DimMode mode = DimMode::Exhaustive, std::uint64_t seed = 0);

// Star tree with legs eps_1 >= eps_2 >= ... > 0 around a hub. Tip i sits at
// the far end of leg i, so d(tip_i, tip_j) = eps_i + eps_j.
struct CombTree {
  std::vector<double> legs;
  MetricTree tree;  // hub is vertex 0, leg i ends at vertex i + 1
  FiniteMetric tips;
};

// Comb whose first 2k legs sum to k^((n-1)/n) for every k <= K, with each
// increment split evenly over two legs. Throws InvalidExponent when an
// increment leaves no positive leg (exponent 1 only admits K = 1).
CombTree comb_tree(double exponent, int K);

struct ScalingRow {
  double x = 0.0;  // k or eps
  double value = 0.0;
  std::string mode;  // exact | greedy | fps | grid
  int trial = 0;
  std::uint64_t seed = 0;
};

struct ScalingSeries {
  std::vector<ScalingRow> rows;
};

// For each k: one matching number per trial on k points drawn from [0,1]^dim
// by farthest-point sampling out of a seeded uniform pool, plus one on a
// deterministic near-uniform grid. Row seeds are derived from (seed, k,
// trial) so trials are independent.
ScalingSeries cube_experiment(int dim, Norm norm, const std::vector<int>& ks,
                              int trials, std::uint64_t seed, double p = 2.0);

struct DimensionFit {
  double slope = 0.0;
  double slope_stderr = 0.0;
  double dim = 1.0;      // 1 / (1 - slope), clamped to [1, inf]
  double dim_low = 1.0;  // same map applied to slope -+ 2 stderr
  double dim_high = 1.0;
  bool monotone = true;  // per-x mean values nondecreasing in x
};

// Least squares of log value against log x over rows with positive value.
// Needs three distinct x values; slope >= 1 maps to dim = infinity.
DimensionFit fit_dimension(const ScalingSeries& s);

}  // namespace treematch
