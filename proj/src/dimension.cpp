#include "treematch/dimension.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

#include "treematch/error.hpp"
#include "treematch/matching.hpp"
#include "treematch/rng.hpp"

namespace treematch {

namespace {

constexpr long long kExhaustiveBudget = 200000;
constexpr int kEpsExhaustiveLimit = 16;
constexpr int kGreedyRestarts = 8;

// C(n + k - 1, k), saturated well past the budget to dodge overflow.
long long multiset_count(int n, int k) {
  long long r = 1;
  for (int i = 1; i <= k; ++i) {
    r = r * (n - 1 + i) / i;  // running value is C(n-1+i, i), always integral
    if (r > 8 * kExhaustiveBudget) return r;
  }
  return r;
}

double subset_value(const FiniteMetric& m, const std::vector<int>& idx) {
  return min_matching(m.restrict_to(idx)).value;
}

int widest_point(const FiniteMetric& m) {
  int n = m.size();
  int best = 0;
  double bestsum = -1.0;
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += m(i, j);
    if (s > bestsum) {
      bestsum = s;
      best = i;
    }
  }
  return best;
}

// Farthest-point sampling of count indices starting from start; repeats can
// appear only once every remaining gap is zero, which leaves the value alone.
std::vector<int> farthest_points(const FiniteMetric& m, int count, int start) {
  int n = m.size();
  std::vector<int> chosen;
  chosen.reserve(count);
  std::vector<double> gap(n);
  for (int i = 0; i < n; ++i) gap[i] = m(start, i);
  chosen.push_back(start);
  while (static_cast<int>(chosen.size()) < count) {
    int pick = 0;
    for (int i = 1; i < n; ++i)
      if (gap[i] > gap[pick]) pick = i;
    chosen.push_back(pick);
    for (int i = 0; i < n; ++i) gap[i] = std::min(gap[i], m(pick, i));
  }
  return chosen;
}

std::uint64_t row_seed(std::uint64_t seed, std::uint64_t k, std::uint64_t trial) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (k + 1) + 0xbf58476d1ce4e5b9ULL * (trial + 1);
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double norm_distance(const std::vector<double>& a, const std::vector<double>& b,
                     Norm norm, double p) {
  double acc = 0.0;
  switch (norm) {
    case Norm::L1:
      for (std::size_t i = 0; i < a.size(); ++i) acc += std::abs(a[i] - b[i]);
      return acc;
    case Norm::L2:
      for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
      return std::sqrt(acc);
    case Norm::LInf:
      for (std::size_t i = 0; i < a.size(); ++i) acc = std::max(acc, std::abs(a[i] - b[i]));
      return acc;
    case Norm::LP:
      for (std::size_t i = 0; i < a.size(); ++i) acc += std::pow(std::abs(a[i] - b[i]), p);
      return std::pow(acc, 1.0 / p);
  }
  return 0.0;
}

// Grid covering [0,1]^dim with at least want sites, listed lexicographically.
std::vector<std::vector<double>> grid_points(int dim, int want) {
  int side = 1;
  while (std::pow(double(side), dim) < double(want)) ++side;
  std::vector<std::vector<double>> pts;
  std::vector<int> idx(dim, 0);
  while (static_cast<int>(pts.size()) < want) {
    std::vector<double> p(dim);
    for (int q = 0; q < dim; ++q)
      p[q] = side == 1 ? 0.5 : double(idx[q]) / double(side - 1);
    pts.push_back(std::move(p));
    int pos = dim - 1;
    while (pos >= 0 && idx[pos] == side - 1) idx[pos--] = 0;
    if (pos < 0) break;
    ++idx[pos];
  }
  return pts;
}

double map_dim(double slope) {
  if (slope >= 1.0) return std::numeric_limits<double>::infinity();
  double n = 1.0 / (1.0 - slope);
  return std::max(1.0, n);
}

}  // namespace

DimValue m_k(const FiniteMetric& m, int k, DimMode mode, std::uint64_t seed) {
  int n = m.size();
  if (n <= 0) fail("InvalidInput", "metric has no points");
  if (k < 0) fail("InvalidInput", "k must be nonnegative");
  if (k % 2 != 0) fail("OddK", "subset size " + std::to_string(k) + " is odd");
  if (k == 0) return {0.0, true};

  if (mode == DimMode::Exhaustive) {
    long long total = multiset_count(n, k);
    if (total > kExhaustiveBudget)
      fail("TooLargeForExhaustive",
           std::to_string(total) + " sub-multisets of size " + std::to_string(k) +
               " from " + std::to_string(n) + " points");
    std::vector<int> idx(k, 0);
    double best = 0.0;
    while (true) {
      best = std::max(best, subset_value(m, idx));
      int pos = k - 1;
      while (pos >= 0 && idx[pos] == n - 1) --pos;
      if (pos < 0) break;
      int v = idx[pos] + 1;
      for (int q = pos; q < k; ++q) idx[q] = v;
    }
    return {best, true};
  }

  int take = std::min(k, n);
  if (take % 2 != 0) --take;
  if (take == 0) return {0.0, false};
  Rng rng(seed);
  double best = 0.0;
  int restarts = std::min(n, kGreedyRestarts);
  for (int r = 0; r < restarts; ++r) {
    int start = r == 0 ? widest_point(m) : rng.uniform_int(0, n - 1);
    best = std::max(best, subset_value(m, farthest_points(m, take, start)));
  }
  return {best, false};
}

DimValue m_eps(const FiniteMetric& m, double eps, DimMode mode, std::uint64_t seed) {
  int n = m.size();
  if (!(eps > 0.0)) fail("InvalidInput", "eps must be positive");
  if (n < 2) return {0.0, true};

  if (mode == DimMode::Exhaustive && n <= kEpsExhaustiveLimit) {
    std::vector<std::uint32_t> sep(n, 0);  // sep[i] bit j: d(i, j) >= eps
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (j != i && m(i, j) >= eps) sep[i] |= 1u << j;
    double best = 0.0;
    std::uint32_t all = n == 32 ? ~0u : (1u << n) - 1;
    for (std::uint32_t mask = 1; mask <= all; ++mask) {
      int c = std::popcount(mask);
      if (c < 2 || c % 2 != 0) continue;
      bool separated = true;
      for (std::uint32_t rest = mask; rest != 0 && separated; rest &= rest - 1) {
        int i = std::countr_zero(rest);
        if ((mask & ~sep[i] & ~(1u << i)) != 0) separated = false;
      }
      if (!separated) continue;
      std::vector<int> idx;
      idx.reserve(c);
      for (int i = 0; i < n; ++i)
        if (mask >> i & 1) idx.push_back(i);
      best = std::max(best, subset_value(m, idx));
    }
    return {best, true};
  }

  Rng rng(seed);
  double best = 0.0;
  std::vector<int> order(n);
  for (int r = 0; r < kGreedyRestarts; ++r) {
    std::iota(order.begin(), order.end(), 0);
    if (r > 0)
      for (int i = n - 1; i > 0; --i)
        std::swap(order[i], order[rng.uniform_int(0, i)]);
    std::vector<int> chosen;
    for (int i : order) {
      bool ok = true;
      for (int j : chosen)
        if (m(i, j) < eps) {
          ok = false;
          break;
        }
      if (ok) chosen.push_back(i);
    }
    if (chosen.size() % 2 != 0) chosen.pop_back();
    if (!chosen.empty()) best = std::max(best, subset_value(m, chosen));
  }
  return {best, false};
}

CombTree comb_tree(double exponent, int K) {
  if (!(exponent >= 1.0)) fail("InvalidExponent", "exponent must be at least 1");
  if (K < 1) fail("InvalidInput", "K must be at least 1");
  double alpha = (exponent - 1.0) / exponent;
  CombTree out;
  out.legs.reserve(2 * static_cast<std::size_t>(K));
  double prev = 0.0;
  for (int k = 1; k <= K; ++k) {
    double cur = std::pow(double(k), alpha);
    double half = 0.5 * (cur - prev);
    if (!(half > 1e-12))
      fail("InvalidExponent", "profile increment at k=" + std::to_string(k) +
                                  " leaves no positive leg");
    out.legs.push_back(half);
    out.legs.push_back(half);
    prev = cur;
  }

  int tips = 2 * K;
  out.tree.vertices.resize(tips + 1);
  std::iota(out.tree.vertices.begin(), out.tree.vertices.end(), 0);
  out.tree.embed.resize(tips);
  for (int i = 0; i < tips; ++i) {
    out.tree.edges.emplace_back(0, i + 1, out.legs[i]);
    out.tree.embed[i] = i + 1;
  }
  validate_tree(out.tree);

  out.tips = FiniteMetric(tips);
  for (int i = 0; i < tips; ++i)
    for (int j = i + 1; j < tips; ++j)
      out.tips.set(i, j, out.legs[i] + out.legs[j]);
  return out;
}

ScalingSeries cube_experiment(int dim, Norm norm, const std::vector<int>& ks,
                              int trials, std::uint64_t seed, double p) {
  if (dim < 1) fail("InvalidInput", "dimension must be at least 1");
  if (trials < 1) fail("InvalidInput", "trials must be at least 1");
  ScalingSeries out;
  for (int k : ks) {
    if (k < 2 || k % 2 != 0)
      fail("OddK", "sample size " + std::to_string(k) + " is not a positive even count");
    for (int trial = 0; trial < trials; ++trial) {
      std::uint64_t rs = row_seed(seed, std::uint64_t(k), std::uint64_t(trial));
      Rng rng(rs);
      int pool = std::max(512, 8 * k);
      std::vector<std::vector<double>> pts(pool, std::vector<double>(dim));
      for (auto& pt : pts)
        for (double& c : pt) c = rng.uniform();
      std::vector<int> chosen;
      chosen.reserve(k);
      int start = rng.uniform_int(0, pool - 1);
      std::vector<double> gap(pool);
      for (int i = 0; i < pool; ++i)
        gap[i] = norm_distance(pts[start], pts[i], norm, p);
      chosen.push_back(start);
      while (static_cast<int>(chosen.size()) < k) {
        int pick = 0;
        for (int i = 1; i < pool; ++i)
          if (gap[i] > gap[pick]) pick = i;
        chosen.push_back(pick);
        for (int i = 0; i < pool; ++i)
          gap[i] = std::min(gap[i], norm_distance(pts[pick], pts[i], norm, p));
      }
      std::vector<std::vector<double>> sample;
      sample.reserve(k);
      for (int i : chosen) sample.push_back(pts[i]);
      double value = min_matching(from_points(sample, norm, p)).value;
      out.rows.push_back({double(k), value, "fps", trial, rs});
    }
    double gv = min_matching(from_points(grid_points(dim, k), norm, p)).value;
    out.rows.push_back({double(k), gv, "grid", 0, seed});
  }
  return out;
}

DimensionFit fit_dimension(const ScalingSeries& s) {
  std::vector<std::pair<double, double>> logs;  // (log x, log value)
  for (const auto& row : s.rows) {
    if (!(row.x > 0.0)) fail("InvalidInput", "nonpositive x in series");
    if (row.value > 0.0) logs.emplace_back(std::log(row.x), std::log(row.value));
  }
  std::vector<double> xs;
  for (const auto& lp : logs) xs.push_back(lp.first);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  if (xs.size() < 3)
    fail("InsufficientData", "need three distinct positive-value x, have " +
                                 std::to_string(xs.size()));

  double n = double(logs.size());
  double sx = 0.0, sy = 0.0;
  for (const auto& [lx, lv] : logs) {
    sx += lx;
    sy += lv;
  }
  double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [lx, lv] : logs) {
    sxx += (lx - mx) * (lx - mx);
    sxy += (lx - mx) * (lv - my);
  }
  double slope = sxy / sxx;
  double intercept = my - slope * mx;
  double ss = 0.0;
  for (const auto& [lx, lv] : logs) {
    double r = lv - (intercept + slope * lx);
    ss += r * r;
  }
  double se = logs.size() > 2 ? std::sqrt(ss / (n - 2.0) / sxx) : 0.0;
  if (!std::isfinite(slope) || !std::isfinite(se))
    fail("SlopeOutOfRange", "log-log regression did not produce a finite slope");

  DimensionFit fit;
  fit.slope = slope;
  fit.slope_stderr = se;
  fit.dim = map_dim(slope);
  fit.dim_low = map_dim(slope - 2.0 * se);
  fit.dim_high = map_dim(slope + 2.0 * se);

  // per-x means over every row, zero values included
  std::vector<std::pair<double, std::pair<double, int>>> acc;
  for (const auto& row : s.rows) {
    bool found = false;
    for (auto& a : acc)
      if (a.first == row.x) {
        a.second.first += row.value;
        a.second.second += 1;
        found = true;
      }
    if (!found) acc.push_back({row.x, {row.value, 1}});
  }
  std::sort(acc.begin(), acc.end());
  fit.monotone = true;
  for (std::size_t i = 1; i < acc.size(); ++i) {
    double prev = acc[i - 1].second.first / acc[i - 1].second.second;
    double cur = acc[i].second.first / acc[i].second.second;
    if (cur < prev - 1e-9) fit.monotone = false;
  }
  return fit;
}

}  // namespace treematch
