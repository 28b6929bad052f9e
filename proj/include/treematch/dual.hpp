#pragma once

#include "treematch/matching.hpp"
#include "treematch/metric.hpp"

namespace treematch {

struct DualResult {
  FiniteMetric D;
  double w = 0.0;  // sum of D over unordered pairs
  double m = 0.0;  // matching number of (X, D)
  int cuts = 0;    // matching cuts separated on the way
  bool tree_like = false;
};

struct DualCheck {
  double worst_domination = 0.0;  // max over pairs of D - d, positive is bad
  double worst_triangle = 0.0;    // worst triangle violation in D
  double worst_four_point = 0.0;  // four point defect of D
  double matching_gap = 0.0;      // |m(X, D) - m(X, d)|
  bool dominated = false;
  bool triangle_ok = false;
  bool matching_preserved = false;
  bool tree_like = false;
};

// Minimizes the total weight of D subject to 0 <= D <= d, the triangle
// inequality, and preservation of the matching number, by cutting planes
// over perfect matchings. Requires even n. The result is minimal under
// entrywise comparison among such D.
DualResult minimize_dual(const FiniteMetric& d);

DualCheck verify_dual(const FiniteMetric& d, const FiniteMetric& D, double tol = kTolGeom);

// Greedy alternative to the cutting-plane solver: repeatedly picks a pair,
// collects every pair whose geodesic passes through it, and lowers the whole
// family as far as feasibility allows. Stops at a point that cannot be
// lowered any further; throws StallDetected if that point fails the
// four point condition.
FiniteMetric dual_via_descent(const FiniteMetric& d, double step_tol = 1e-9);

}  // namespace treematch
