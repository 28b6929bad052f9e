#pragma once

#include "treematch/metric.hpp"

namespace treematch {

// Rational-arithmetic audit of a dual pair (d, D). Every slack is evaluated
// exactly over the binary values of the doubles and compared to the stated
// tolerance, so the booleans carry no rounding slop of their own.
struct ExactDualReport {
  bool dominated = false;           // max(D - d) <= dom_tol
  bool triangle_ok = false;         // triangle violation of D <= tri_tol
  bool four_point_ok = false;       // four point defect of D <= fp_tol
  bool matching_preserved = false;  // |m(X,D) - m(X,d)| <= match_tol
  double worst_domination = 0.0;    // exact slacks rounded once for display
  double worst_triangle = 0.0;
  double worst_four_point = 0.0;
  double matching_gap = 0.0;
};

// Subset dynamic program over exact rationals; needs even n <= 16.
double exact_min_matching_value(const FiniteMetric& m);

// Zero diagonal, symmetry, nonnegativity, triangle violation <= tol, all in
// exact arithmetic.
bool exact_is_metric(const FiniteMetric& m, double tol = kTolExact);

ExactDualReport exact_check_dual(const FiniteMetric& d, const FiniteMetric& D,
                                 double dom_tol = kTolExact, double tri_tol = 1e-7,
                                 double fp_tol = kTolGeom, double match_tol = kTolGeom);

}  // namespace treematch
