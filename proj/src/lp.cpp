#include "treematch/lp.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "treematch/error.hpp"

// Bounded-variable simplex on a dense tableau. Structural variables live in
// [0, ub]; each >= row gets a surplus variable so the system is
// sum a_j x_j - s_r = b_r with s_r >= 0. Starting every structural variable
// at its upper bound makes the all-surplus basis feasible, so there is no
// phase 1. Pricing is steepest (Dantzig) until the objective stalls, then
// Bland's rule takes over to rule out cycling.

namespace treematch {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Tableau {
  int nvar;
  int nrow;
  int ncol;  // nvar structural + nrow surplus
  std::vector<double> tab;
  std::vector<double> rhs;      // transformed right-hand side column
  std::vector<double> red;      // reduced cost row
  std::vector<double> xb;       // basic values
  std::vector<int> basis;       // row -> column
  std::vector<char> in_basis;   // column -> flag
  std::vector<char> at_upper;   // nonbasic columns only
  const std::vector<double>& ub;

  double& at(int r, int j) { return tab[static_cast<std::size_t>(r) * ncol + j]; }
  double get(int r, int j) const { return tab[static_cast<std::size_t>(r) * ncol + j]; }

  Tableau(const std::vector<double>& c, const std::vector<double>& ubounds,
          const std::vector<LpRow>& rows)
      : nvar(static_cast<int>(c.size())),
        nrow(static_cast<int>(rows.size())),
        ncol(nvar + static_cast<int>(rows.size())),
        ub(ubounds) {
    tab.assign(static_cast<std::size_t>(nrow) * ncol, 0.0);
    rhs.assign(nrow, 0.0);
    red = c;
    red.resize(ncol, 0.0);
    xb.assign(nrow, 0.0);
    basis.resize(nrow);
    in_basis.assign(ncol, 0);
    at_upper.assign(ncol, 0);
    for (int j = 0; j < nvar; ++j) at_upper[j] = 1;

    // row r holds a.x - s_r = b_r, scaled by -1 so the surplus column is +1
    for (int r = 0; r < nrow; ++r) {
      double lhs_at_ub = 0.0;
      for (const auto& [j, a] : rows[r].terms) {
        if (j < 0 || j >= nvar) fail("InternalError", "lp column index out of range");
        at(r, j) -= a;
        lhs_at_ub += a * ub[j];
      }
      at(r, nvar + r) = 1.0;
      rhs[r] = -rows[r].rhs;
      basis[r] = nvar + r;
      in_basis[nvar + r] = 1;
      xb[r] = lhs_at_ub - rows[r].rhs;
      if (xb[r] < -1e-7 * (1.0 + std::abs(rows[r].rhs)))
        fail("LPNumericalFailure", "upper-bound start is infeasible");
      xb[r] = std::max(xb[r], 0.0);
    }
  }

  double upper(int j) const { return j < nvar ? ub[j] : kInf; }
  double nonbasic_value(int j) const { return at_upper[j] ? upper(j) : 0.0; }

  // Recomputes the basic values from the transformed system, clearing the
  // drift that incremental updates accumulate.
  void refresh_xb() {
    for (int r = 0; r < nrow; ++r) {
      double v = rhs[r];
      for (int j = 0; j < nvar; ++j)
        if (!in_basis[j] && at_upper[j]) v -= get(r, j) * ub[j];
      xb[r] = v;
    }
  }
};

}  // namespace

LpResult solve_lp_upper_start(const std::vector<double>& c, const std::vector<double>& ub,
                              const std::vector<LpRow>& rows) {
  const int nvar = static_cast<int>(c.size());
  if (static_cast<int>(ub.size()) != nvar) fail("InternalError", "lp bound size mismatch");
  for (double u : ub)
    if (!std::isfinite(u) || u < 0.0) fail("InternalError", "lp bounds must be finite");

  Tableau t(c, ub, rows);

  double cmax = 1.0;
  for (double v : c) cmax = std::max(cmax, std::abs(v));
  const double tol_opt = 1e-9 * cmax;
  const double tol_piv = 1e-9;

  const long long max_iters = 2000LL + 50LL * (t.nrow + t.ncol);
  bool bland = false;
  int stall = 0;
  double last_obj = kInf;
  int iters = 0;

  auto objective_now = [&]() {
    double obj = 0.0;
    for (int r = 0; r < t.nrow; ++r)
      if (t.basis[r] < nvar) obj += c[t.basis[r]] * t.xb[r];
    for (int j = 0; j < nvar; ++j)
      if (!t.in_basis[j]) obj += c[j] * t.nonbasic_value(j);
    return obj;
  };

  while (true) {
    if (++iters > max_iters) fail("LPNumericalFailure", "simplex iteration limit");
    if (iters % 256 == 0) t.refresh_xb();

    // entering column: Dantzig shortlist re-ranked by column norm, which
    // approximates steepest edge and cuts the pivot count considerably
    int enter = -1;
    if (bland) {
      for (int j = 0; j < t.ncol && enter < 0; ++j) {
        if (t.in_basis[j]) continue;
        const double score = t.at_upper[j] ? t.red[j] : -t.red[j];
        if (score > tol_opt) enter = j;
      }
    } else {
      constexpr int kShortlist = 24;
      std::array<std::pair<double, int>, kShortlist> top;
      int nt = 0;
      for (int j = 0; j < t.ncol; ++j) {
        if (t.in_basis[j]) continue;
        const double score = t.at_upper[j] ? t.red[j] : -t.red[j];
        if (score <= tol_opt) continue;
        if (nt < kShortlist) {
          top[nt++] = {score, j};
          if (nt == kShortlist)
            std::sort(top.begin(), top.end());
        } else if (score > top[0].first) {
          top[0] = {score, j};
          std::sort(top.begin(), top.end());
        }
      }
      double best = 0.0;
      for (int s = 0; s < nt; ++s) {
        const int j = top[s].second;
        double norm2 = 1.0;
        for (int r = 0; r < t.nrow; ++r) norm2 += t.get(r, j) * t.get(r, j);
        const double gain = top[s].first * top[s].first / norm2;
        if (gain > best) {
          best = gain;
          enter = j;
        }
      }
    }
    if (enter < 0) break;  // optimal

    const double dir = t.at_upper[enter] ? -1.0 : 1.0;

    // ratio test
    double tmin = t.upper(enter);  // bound-to-bound flip distance
    int prow = -1;
    bool leave_at_upper = false;
    for (int r = 0; r < t.nrow; ++r) {
      const double g = t.at(r, enter) * dir;
      double cand = kInf;
      bool cand_upper = false;
      if (g > tol_piv) {
        cand = t.xb[r] / g;
      } else if (g < -tol_piv) {
        const double u = t.upper(t.basis[r]);
        if (std::isfinite(u)) {
          cand = (u - t.xb[r]) / (-g);
          cand_upper = true;
        }
      }
      if (cand < -0.0) cand = 0.0;
      bool better = cand < tmin - 1e-12;
      if (!better && prow >= 0 && cand <= tmin + 1e-12) {
        better = bland ? t.basis[r] < t.basis[prow]
                       : std::abs(t.at(r, enter)) > std::abs(t.at(prow, enter));
      }
      if (better) {
        tmin = std::min(tmin, std::max(cand, 0.0));
        prow = r;
        leave_at_upper = cand_upper;
      }
    }
    if (!std::isfinite(tmin)) fail("LPNumericalFailure", "simplex detected an unbounded ray");
    tmin = std::max(tmin, 0.0);

    if (prow < 0) {
      // entering variable runs to its other bound
      for (int r = 0; r < t.nrow; ++r) t.xb[r] -= t.at(r, enter) * dir * tmin;
      t.at_upper[enter] = !t.at_upper[enter];
    } else {
      const double enter_value = t.nonbasic_value(enter) + dir * tmin;
      for (int r = 0; r < t.nrow; ++r)
        if (r != prow) t.xb[r] -= t.at(r, enter) * dir * tmin;

      const int leave = t.basis[prow];
      t.in_basis[leave] = 0;
      t.at_upper[leave] = leave_at_upper ? 1 : 0;
      t.basis[prow] = enter;
      t.in_basis[enter] = 1;
      t.xb[prow] = enter_value;

      const double piv = t.at(prow, enter);
      if (std::abs(piv) < tol_piv) fail("LPNumericalFailure", "vanishing pivot element");
      const double inv = 1.0 / piv;
      for (int j = 0; j < t.ncol; ++j) t.at(prow, j) *= inv;
      t.rhs[prow] *= inv;
      for (int r = 0; r < t.nrow; ++r) {
        if (r == prow) continue;
        const double f = t.at(r, enter);
        if (f == 0.0) continue;
        for (int j = 0; j < t.ncol; ++j) t.at(r, j) -= f * t.at(prow, j);
        t.rhs[r] -= f * t.rhs[prow];
        t.at(r, enter) = 0.0;
      }
      const double fr = t.red[enter];
      if (fr != 0.0) {
        for (int j = 0; j < t.ncol; ++j) t.red[j] -= fr * t.at(prow, j);
        t.red[enter] = 0.0;
      }
    }

    if (!bland) {
      const double obj = objective_now();
      if (obj < last_obj - 1e-12 * (1.0 + std::abs(last_obj))) {
        stall = 0;
        last_obj = obj;
      } else if (++stall > 200) {
        bland = true;
      }
    }
  }

  LpResult out;
  out.iterations = iters;
  out.x.assign(nvar, 0.0);
  t.refresh_xb();
  for (int j = 0; j < nvar; ++j)
    if (!t.in_basis[j]) out.x[j] = t.nonbasic_value(j);
  for (int r = 0; r < t.nrow; ++r)
    if (t.basis[r] < nvar) out.x[t.basis[r]] = std::clamp(t.xb[r], 0.0, ub[t.basis[r]]);

  double scale = 1.0;
  for (const LpRow& row : rows) scale = std::max(scale, std::abs(row.rhs));
  double worst_residual = 0.0;
  for (const LpRow& row : rows) {
    double lhs = 0.0;
    for (const auto& [j, a] : row.terms) lhs += a * out.x[j];
    worst_residual = std::max(worst_residual, row.rhs - lhs);
  }
  if (worst_residual > 1e-6 * scale)
    fail("LPNumericalFailure",
         "solution violates a row by " + std::to_string(worst_residual) + " after cleanup");
  out.objective = 0.0;
  for (int j = 0; j < nvar; ++j) out.objective += c[j] * out.x[j];
  return out;
}

}  // namespace treematch
