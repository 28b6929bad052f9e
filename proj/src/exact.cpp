#include "treematch/exact.hpp"

#include <boost/multiprecision/cpp_int.hpp>
#include <bit>
#include <string>
#include <vector>

#include "treematch/error.hpp"

namespace treematch {

namespace {

using Rat = boost::multiprecision::cpp_rational;

constexpr int kExactDpLimit = 16;

std::vector<Rat> to_rational(const FiniteMetric& m) {
  std::vector<Rat> r;
  r.reserve(m.flat().size());
  for (double v : m.flat()) r.emplace_back(v);
  return r;
}

Rat rational_matching_value(const FiniteMetric& m) {
  const int n = m.size();
  if (n % 2 != 0) fail("OddCardinality", std::to_string(n) + " points cannot be matched");
  if (n > kExactDpLimit)
    fail("TooLarge", "exact matching limited to " + std::to_string(kExactDpLimit) + " points");
  if (n == 0) return Rat(0);
  const std::vector<Rat> d = to_rational(m);
  auto at = [&](int i, int j) -> const Rat& { return d[std::size_t(i) * n + j]; };
  const std::uint32_t full = (1u << n) - 1;
  std::vector<Rat> dp(full + 1, Rat(0));
  std::vector<bool> seen(full + 1, false);
  seen[0] = true;
  for (std::uint32_t mask = 1; mask <= full; ++mask) {
    if (std::popcount(mask) % 2 != 0) continue;
    const int i = std::countr_zero(mask);
    bool any = false;
    for (int j = i + 1; j < n; ++j) {
      if (!(mask >> j & 1)) continue;
      const std::uint32_t rest = mask ^ (1u << i) ^ (1u << j);
      if (!seen[rest]) continue;
      Rat cand = dp[rest] + at(i, j);
      if (!any || cand < dp[mask]) dp[mask] = std::move(cand);
      any = true;
    }
    seen[mask] = any;
  }
  return dp[full];
}

}  // namespace

double exact_min_matching_value(const FiniteMetric& m) {
  return rational_matching_value(m).convert_to<double>();
}

bool exact_is_metric(const FiniteMetric& m, double tol) {
  const int n = m.size();
  const std::vector<Rat> d = to_rational(m);
  auto at = [&](int i, int j) -> const Rat& { return d[std::size_t(i) * n + j]; };
  const Rat bound(tol);
  for (int i = 0; i < n; ++i) {
    if (at(i, i) != 0) return false;
    for (int j = 0; j < n; ++j) {
      if (at(i, j) != at(j, i)) return false;
      if (at(i, j) < 0) return false;
    }
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        if (at(i, j) - at(i, k) - at(k, j) > bound) return false;
  return true;
}

ExactDualReport exact_check_dual(const FiniteMetric& d, const FiniteMetric& D,
                                 double dom_tol, double tri_tol, double fp_tol,
                                 double match_tol) {
  if (d.size() != D.size())
    fail("DimensionMismatch", "metrics have sizes " + std::to_string(d.size()) + " and " +
                                  std::to_string(D.size()));
  const int n = d.size();
  const std::vector<Rat> rd = to_rational(d);
  const std::vector<Rat> rD = to_rational(D);
  auto base = [&](int i, int j) -> const Rat& { return rd[std::size_t(i) * n + j]; };
  auto dual = [&](int i, int j) -> const Rat& { return rD[std::size_t(i) * n + j]; };

  ExactDualReport rep;
  Rat worst_dom(0);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      Rat s = dual(i, j) - base(i, j);
      if (s > worst_dom) worst_dom = std::move(s);
    }
  rep.dominated = worst_dom <= Rat(dom_tol);
  rep.worst_domination = worst_dom.convert_to<double>();

  Rat worst_tri(0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        if (i == j || j == k || i == k) continue;
        Rat s = dual(i, j) - dual(i, k) - dual(k, j);
        if (s > worst_tri) worst_tri = std::move(s);
      }
  rep.triangle_ok = worst_tri <= Rat(tri_tol);
  rep.worst_triangle = worst_tri.convert_to<double>();

  Rat worst_fp(0);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      for (int c = b + 1; c < n; ++c)
        for (int e = c + 1; e < n; ++e) {
          Rat s1 = dual(a, b) + dual(c, e);
          Rat s2 = dual(a, c) + dual(b, e);
          Rat s3 = dual(a, e) + dual(b, c);
          Rat top = s1, second = s2;
          if (second > top) std::swap(top, second);
          if (s3 > top) {
            second = top;
            top = s3;
          } else if (s3 > second) {
            second = s3;
          }
          Rat defect = top - second;
          if (defect > worst_fp) worst_fp = std::move(defect);
        }
  rep.four_point_ok = worst_fp <= Rat(fp_tol);
  rep.worst_four_point = worst_fp.convert_to<double>();

  const Rat gap = abs(rational_matching_value(D) - rational_matching_value(d));
  rep.matching_preserved = gap <= Rat(match_tol);
  rep.matching_gap = gap.convert_to<double>();
  return rep;
}

}  // namespace treematch
