#include "treematch/dual.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>
#include <string>

#include "treematch/error.hpp"
#include "treematch/lp.hpp"
#include "treematch/rng.hpp"

namespace treematch {

namespace {

// All triangle rows are stated upfront; only the matching constraints are
// separated lazily. The dense tableau makes larger spaces impractical, so
// the entry point refuses them instead of grinding.
constexpr int kMaxPoints = 14;
constexpr int kMaxCuts = 500;
constexpr int kMaxRounds = 300;

int pair_index(int n, int i, int j) {
  if (i > j) std::swap(i, j);
  return i * n - i * (i + 1) / 2 + (j - i - 1);
}

FiniteMetric unpack(int n, const std::vector<double>& x) {
  FiniteMetric D(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) D.set(i, j, std::max(0.0, x[pair_index(n, i, j)]));
  return D;
}

LpRow triangle_row(int n, int i, int j, int k) {
  // D(i,j) <= D(i,k) + D(k,j)
  LpRow row;
  row.terms = {{pair_index(n, i, k), 1.0},
               {pair_index(n, k, j), 1.0},
               {pair_index(n, i, j), -1.0}};
  row.rhs = 0.0;
  return row;
}

LpRow matching_row(int n, const Matching& pi, double target) {
  LpRow row;
  for (const auto& [a, b] : pi.pairs) row.terms.push_back({pair_index(n, a, b), 1.0});
  row.rhs = target;
  return row;
}

}  // namespace

DualResult minimize_dual(const FiniteMetric& d_in) {
  const FiniteMetric d = validate_metric(d_in, kTolGeom);
  const int n = d.size();
  if (n % 2 != 0) fail("OddCardinality", "matching number needs an even point count");
  if (n > kMaxPoints) fail("TooLarge", "dualization supports up to 14 points");

  const MatchingResult base = min_matching(d);
  const double target = base.value;
  const double scale = 1.0 + d.diameter();
  const double cut_tol = 1e-7 * scale;

  const int nvar = n * (n - 1) / 2;
  std::vector<double> cost(nvar, 1.0);
  std::vector<double> ub(nvar);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) ub[pair_index(n, i, j)] = d(i, j);

  std::vector<LpRow> rows;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = 0; k < n; ++k)
        if (k != i && k != j) rows.push_back(triangle_row(n, i, j, k));

  std::set<std::vector<std::pair<int, int>>> cut_keys;
  int cuts = 0;
  auto add_cut = [&](const Matching& pi) {
    if (!cut_keys.insert(pi.pairs).second) return false;
    rows.push_back(matching_row(n, pi, target));
    ++cuts;
    return true;
  };
  add_cut(base.matching);

  FiniteMetric D(n);
  double objective = 0.0;
  Rng perturb(0x5eedff);
  for (int round = 0;; ++round) {
    if (round >= kMaxRounds) fail("IterationLimit", "matching cut separation did not settle");
    const LpResult res = solve_lp_upper_start(cost, ub, rows);
    D = unpack(n, res.x);
    objective = res.objective;

    const MatchingResult cur = min_matching(D);
    if (cur.value >= target - cut_tol) break;
    if (cuts >= kMaxCuts) fail("IterationLimit", "matching cut budget exhausted");

    bool added = add_cut(cur.matching);
    // harvest more violated matchings from the optimal face by breaking
    // ties at random; every one of them is a valid cut
    for (int sample = 0; sample < 8 && cuts < kMaxCuts; ++sample) {
      FiniteMetric jig = D;
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
          jig.set(i, j, D(i, j) * (1.0 + 1e-4 * perturb.uniform()));
      const Matching alt = min_matching(jig).matching;
      if (matching_value(D, alt) < target - cut_tol) added |= add_cut(alt);
    }
    if (!added) fail("LPNumericalFailure", "separation returned only known cuts");
  }

  DualResult out;
  out.D = D;
  out.w = objective;
  out.m = min_matching(D).value;
  out.cuts = cuts;
  out.tree_like = is_tree_like(D, kTolGeom).tree_like;
  return out;
}

DualCheck verify_dual(const FiniteMetric& d, const FiniteMetric& D, double tol) {
  if (d.size() != D.size()) fail("DimensionMismatch", "metrics of different sizes");
  const int n = d.size();

  DualCheck out;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      out.worst_domination = std::max(out.worst_domination, D(i, j) - d(i, j));
  out.worst_triangle = std::max(0.0, worst_triangle_violation(D).violation);
  const FourPointReport fp = is_tree_like(D, tol);
  out.worst_four_point = fp.violation;
  out.matching_gap = std::abs(min_matching(D).value - min_matching(d).value);

  out.dominated = out.worst_domination <= tol;
  out.triangle_ok = out.worst_triangle <= tol;
  out.matching_preserved = out.matching_gap <= tol;
  out.tree_like = fp.tree_like;
  return out;
}

FiniteMetric dual_via_descent(const FiniteMetric& d_in, double step_tol) {
  const FiniteMetric d = validate_metric(d_in, kTolGeom);
  const int n = d.size();
  if (n % 2 != 0) fail("OddCardinality", "matching number needs an even point count");

  const double target = min_matching(d).value;
  const double scale = 1.0 + d.diameter();
  const double floor_step = step_tol * scale;

  FiniteMetric D = d;

  auto feasible = [&](const FiniteMetric& cand) {
    if (worst_triangle_violation(cand).violation > 1e-9 * scale) return false;
    return min_matching(cand).value >= target - 1e-9 * scale;
  };

  // every pair {k, l} whose geodesic runs through i and j, in either order
  auto family_of = [&](int i, int j) {
    std::vector<std::pair<int, int>> fam;
    for (int k = 0; k < n; ++k)
      for (int l = k + 1; l < n; ++l)
        if (interval_contains(D, i, j, k, l, 1e-9 * scale) ||
            interval_contains(D, j, i, k, l, 1e-9 * scale))
          fam.push_back({k, l});
    return fam;
  };

  auto lowered = [&](const std::vector<std::pair<int, int>>& fam, double eps) {
    FiniteMetric cand = D;
    for (const auto& [k, l] : fam) cand.set(k, l, std::max(0.0, D(k, l) - eps));
    return cand;
  };

  for (int sweep = 0; sweep < 10000; ++sweep) {
    bool progressed = false;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (D(i, j) <= floor_step) continue;
        const auto fam = family_of(i, j);
        double cap = D(i, j);
        for (const auto& [k, l] : fam) cap = std::min(cap, D(k, l));
        if (cap <= floor_step) continue;

        double eps = 0.0;
        if (feasible(lowered(fam, cap))) {
          eps = cap;
        } else {
          double lo = 0.0, hi = cap;
          for (int it = 0; it < 60 && hi - lo > 1e-12 * scale; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (feasible(lowered(fam, mid)))
              lo = mid;
            else
              hi = mid;
          }
          eps = lo;
        }
        if (eps > floor_step) {
          D = lowered(fam, eps);
          progressed = true;
        }
      }
    }
    if (!progressed) break;
  }

  const FourPointReport fp = is_tree_like(D, kTolGeom);
  if (!fp.tree_like)
    fail("StallDetected",
         "descent stopped at a point violating the four point condition by " +
             std::to_string(fp.violation));
  return D;
}

}  // namespace treematch
