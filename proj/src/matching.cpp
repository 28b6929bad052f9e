#include "treematch/matching.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <tuple>

#include "treematch/blossom.hpp"
#include "treematch/error.hpp"

namespace treematch {

namespace {

Matching normalized(std::vector<std::pair<int, int>> pairs) {
  for (auto& [a, b] : pairs)
    if (a > b) std::swap(a, b);
  std::sort(pairs.begin(), pairs.end());
  return Matching{std::move(pairs)};
}

void require_even(const FiniteMetric& m) {
  if (m.size() < 2 || m.size() % 2 != 0)
    fail("OddCardinality", "matching needs an even number of points, got " + std::to_string(m.size()));
}

}  // namespace

void validate_matching(const Matching& m, int n) {
  std::vector<char> seen(n, 0);
  for (const auto& [a, b] : m.pairs) {
    if (a < 0 || b < 0 || a >= n || b >= n || a == b)
      fail("InvalidMatching", "pair (" + std::to_string(a) + "," + std::to_string(b) + ")");
    if (seen[a] || seen[b]) fail("InvalidMatching", "point matched twice");
    seen[a] = seen[b] = 1;
  }
  if (static_cast<int>(m.pairs.size()) * 2 != n)
    fail("InvalidMatching", "matching is not perfect");
}

void validate_partition(const Partition2& p, int n) {
  std::vector<char> seen(n, 0);
  for (int v : p.plus) {
    if (v < 0 || v >= n || seen[v]) fail("InvalidPartition", "bad plus index " + std::to_string(v));
    seen[v] = 1;
  }
  for (int v : p.minus) {
    if (v < 0 || v >= n || seen[v]) fail("InvalidPartition", "bad minus index " + std::to_string(v));
    seen[v] = 1;
  }
  if (p.plus.size() != p.minus.size()) fail("InvalidPartition", "classes have different sizes");
  if (static_cast<int>(p.plus.size() + p.minus.size()) != n)
    fail("InvalidPartition", "partition does not cover all points");
}

double matching_value(const FiniteMetric& m, const Matching& pi) {
  double v = 0.0;
  for (const auto& [a, b] : pi.pairs) v += m(a, b);
  return v;
}

MatchingResult min_matching(const FiniteMetric& m) {
  require_even(m);
  const int n = m.size();
  const double maxd = m.diameter();
  std::vector<std::tuple<int, int, double>> edges;
  edges.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) edges.emplace_back(i, j, maxd + 1.0 - m(i, j));

  const std::vector<int> mate = detail::max_weight_matching(n, edges, true);
  std::vector<std::pair<int, int>> pairs;
  for (int v = 0; v < n; ++v) {
    if (mate[v] < 0) fail("InternalError", "matching solver left a point unmatched");
    if (v < mate[v]) pairs.emplace_back(v, mate[v]);
  }
  MatchingResult res{normalized(std::move(pairs)), 0.0};
  res.value = matching_value(m, res.matching);
  return res;
}

MatchingResult min_matching_oracle(const FiniteMetric& m) {
  require_even(m);
  const int n = m.size();
  if (n > 22) fail("TooLarge", "oracle handles at most 22 points, got " + std::to_string(n));

  const std::size_t full = std::size_t{1} << n;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> f(full, inf);
  f[0] = 0.0;
  for (std::size_t s = 1; s < full; ++s) {
    if (std::popcount(s) % 2 != 0) continue;
    const int i = std::countr_zero(s);
    const std::size_t rest = s & (s - 1);  // s without lowest bit
    double best = inf;
    for (std::size_t t = rest; t != 0; t &= t - 1) {
      const int j = std::countr_zero(t);
      const double cand = f[rest & ~(std::size_t{1} << j)] + m(i, j);
      if (cand < best) best = cand;
    }
    f[s] = best;
  }

  // backtrack
  std::vector<std::pair<int, int>> pairs;
  std::size_t s = full - 1;
  while (s != 0) {
    const int i = std::countr_zero(s);
    const std::size_t rest = s & (s - 1);
    for (std::size_t t = rest; t != 0; t &= t - 1) {
      const int j = std::countr_zero(t);
      const std::size_t nxt = rest & ~(std::size_t{1} << j);
      if (f[nxt] + m(i, j) <= f[s] + 1e-15 * (1.0 + std::abs(f[s]))) {
        pairs.emplace_back(i, j);
        s = nxt;
        break;
      }
    }
  }
  MatchingResult res{normalized(std::move(pairs)), f[full - 1]};
  return res;
}

namespace {

void enumerate_rec(const FiniteMetric& m, unsigned matched_mask, double partial,
                   double bound, std::vector<std::pair<int, int>>& current,
                   std::vector<Matching>& out) {
  const int n = m.size();
  int i = 0;
  while (i < n && (matched_mask & (1u << i))) ++i;
  if (i == n) {
    out.push_back(Matching{current});
    return;
  }
  for (int j = i + 1; j < n; ++j) {
    if (matched_mask & (1u << j)) continue;
    const double next = partial + m(i, j);
    if (next > bound) continue;
    current.emplace_back(i, j);
    enumerate_rec(m, matched_mask | (1u << i) | (1u << j), next, bound, current, out);
    current.pop_back();
  }
}

}  // namespace

std::vector<Matching> enumerate_min_matchings(const FiniteMetric& m, double tol) {
  require_even(m);
  if (m.size() > 12)
    fail("TooLarge", "enumeration handles at most 12 points, got " + std::to_string(m.size()));
  const double bound = min_matching(m).value + tol;
  std::vector<Matching> out;
  std::vector<std::pair<int, int>> current;
  enumerate_rec(m, 0, 0.0, bound, current, out);
  return out;
}

std::set<std::pair<int, int>> minimal_pairs(const FiniteMetric& m, double tol) {
  std::set<std::pair<int, int>> out;
  for (const Matching& pi : enumerate_min_matchings(m, tol))
    out.insert(pi.pairs.begin(), pi.pairs.end());
  return out;
}

namespace {

// Classic O(n^3) shortest augmenting path assignment solver. Produces an
// optimal assignment together with feasible potentials:
//   u[i] + v[j] <= c[i][j], with equality on assigned pairs.
struct Assignment {
  std::vector<int> row_to_col;
  std::vector<double> u, v;
};

Assignment solve_assignment(const std::vector<std::vector<double>>& c) {
  const int n = static_cast<int>(c.size());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = c[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  Assignment a;
  a.row_to_col.assign(n, -1);
  for (int j = 1; j <= n; ++j)
    if (p[j] > 0) a.row_to_col[p[j] - 1] = j - 1;
  a.u.assign(u.begin() + 1, u.end());
  a.v.assign(v.begin() + 1, v.end());
  return a;
}

}  // namespace

OrientedResult oriented_min_connection(const FiniteMetric& m, const Partition2& p) {
  validate_partition(p, m.size());
  const int k = static_cast<int>(p.plus.size());
  if (k == 0) fail("InvalidPartition", "partition classes are empty");
  std::vector<std::vector<double>> c(k, std::vector<double>(k));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) c[i][j] = m(p.plus[i], p.minus[j]);
  const Assignment a = solve_assignment(c);
  OrientedResult res;
  res.assignment = a.row_to_col;
  for (int i = 0; i < k; ++i) res.value += c[i][a.row_to_col[i]];
  return res;
}

std::vector<double> kantorovich_potential(const FiniteMetric& m, const Partition2& p) {
  validate_partition(p, m.size());
  const int n = m.size();
  const int k = static_cast<int>(p.plus.size());
  if (k == 0) fail("InvalidPartition", "partition classes are empty");
  std::vector<std::vector<double>> c(k, std::vector<double>(k));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) c[i][j] = m(p.plus[i], p.minus[j]);
  const Assignment a = solve_assignment(c);

  // Tighten column potentials so they are dominated by every row, then take
  // the metric transform; the result is 1-Lipschitz by construction.
  std::vector<double> v2(k);
  for (int j = 0; j < k; ++j) {
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < k; ++i) best = std::min(best, c[i][j] - a.u[i]);
    v2[j] = best;
  }
  std::vector<double> f(n);
  for (int z = 0; z < n; ++z) {
    double best = std::numeric_limits<double>::infinity();
    for (int j = 0; j < k; ++j) best = std::min(best, m(z, p.minus[j]) - v2[j]);
    f[z] = best;
  }
  const int anchor = *std::min_element(p.plus.begin(), p.plus.end());
  const double shift = f[anchor];
  for (double& x : f) x -= shift;
  return f;
}

SwapCheck is_locally_minimal_2swap(const FiniteMetric& m, const Matching& pi, double tol) {
  validate_matching(pi, m.size());
  SwapCheck res;
  const auto& pairs = pi.pairs;
  for (std::size_t a = 0; a < pairs.size(); ++a) {
    for (std::size_t b = a + 1; b < pairs.size(); ++b) {
      const auto [p, q] = pairs[a];
      const auto [r, s] = pairs[b];
      const double old_cost = m(p, q) + m(r, s);
      const struct {
        std::pair<int, int> x, y;
      } cand[2] = {{{p, r}, {q, s}}, {{p, s}, {q, r}}};
      for (const auto& cc : cand) {
        const double imp = old_cost - (m(cc.x.first, cc.x.second) + m(cc.y.first, cc.y.second));
        if (imp > tol && imp > res.improvement) {
          res.locally_minimal = false;
          res.improvement = imp;
          res.drop_a = pairs[a];
          res.drop_b = pairs[b];
          res.add_a = cc.x;
          res.add_b = cc.y;
        }
      }
    }
  }
  return res;
}

}  // namespace treematch
