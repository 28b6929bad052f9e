#include "treematch/metric.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "treematch/error.hpp"

namespace treematch {

FiniteMetric FiniteMetric::from_rows(const std::vector<std::vector<double>>& rows) {
  const int n = static_cast<int>(rows.size());
  if (n == 0) fail("InvalidInput", "metric needs at least one point");
  FiniteMetric m(n);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(rows[i].size()) != n)
      fail("InvalidInput", "metric matrix is not square");
    for (int j = 0; j < n; ++j)
      m.d_[static_cast<std::size_t>(i) * n + j] = rows[i][j];
  }
  return m;
}

FiniteMetric FiniteMetric::from_flat(int n, std::vector<double> flat) {
  if (n <= 0 || flat.size() != static_cast<std::size_t>(n) * n)
    fail("InvalidInput", "flat metric data has wrong length");
  FiniteMetric m;
  m.n_ = n;
  m.d_ = std::move(flat);
  return m;
}

double FiniteMetric::diameter() const {
  double d = 0.0;
  for (double v : d_) d = std::max(d, v);
  return d;
}

double FiniteMetric::pair_sum() const {
  double s = 0.0;
  for (int i = 0; i < n_; ++i)
    for (int j = i + 1; j < n_; ++j) s += (*this)(i, j);
  return s;
}

FiniteMetric FiniteMetric::restrict_to(std::span<const int> indices) const {
  const int m = static_cast<int>(indices.size());
  if (m == 0) fail("InvalidInput", "restriction needs at least one index");
  for (int idx : indices)
    if (idx < 0 || idx >= n_) fail("IndexOutOfRange", "restriction index " + std::to_string(idx));
  FiniteMetric out(m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      out.d_[static_cast<std::size_t>(i) * m + j] = (*this)(indices[i], indices[j]);
  return out;
}

TriangleCheck worst_triangle_violation(const FiniteMetric& m) {
  const int n = m.size();
  TriangleCheck worst;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        const double v = m(i, j) - (m(i, k) + m(k, j));
        if (v > worst.violation) {
          worst.violation = v;
          worst.i = i;
          worst.j = j;
          worst.k = k;
          worst.ok = false;
        }
      }
  return worst;
}

FiniteMetric validate_metric(const FiniteMetric& m, double tol) {
  const int n = m.size();
  if (n == 0) fail("InvalidInput", "metric needs at least one point");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (!std::isfinite(m(i, j)))
        fail("InvalidInput", "non-finite entry at (" + std::to_string(i) + "," + std::to_string(j) + ")");
  for (int i = 0; i < n; ++i)
    if (std::abs(m(i, i)) > tol)
      fail("NonzeroDiagonal", "d(" + std::to_string(i) + "," + std::to_string(i) + ") = " + std::to_string(m(i, i)));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::abs(m(i, j) - m(j, i)) > tol)
        fail("AsymmetricInput", "entries (" + std::to_string(i) + "," + std::to_string(j) + ") differ");
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (m(i, j) < -tol)
        fail("NegativeEntry", "d(" + std::to_string(i) + "," + std::to_string(j) + ") = " + std::to_string(m(i, j)));

  FiniteMetric out(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      out.set(i, j, std::max(0.0, 0.5 * (m(i, j) + m(j, i))));

  const TriangleCheck tc = worst_triangle_violation(out);
  if (tc.violation > tol) {
    std::ostringstream os;
    os << "(" << tc.i << "," << tc.j << "," << tc.k << ") magnitude " << tc.violation;
    fail("TriangleViolation", os.str());
  }
  return out;
}

FiniteMetric validate_metric(const std::vector<std::vector<double>>& rows, double tol) {
  return validate_metric(FiniteMetric::from_rows(rows), tol);
}

FourPointReport is_tree_like(const FiniteMetric& m, double tol) {
  const int n = m.size();
  FourPointReport rep;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k)
        for (int l = k + 1; l < n; ++l) {
          const double s1 = m(i, j) + m(k, l);
          const double s2 = m(i, k) + m(j, l);
          const double s3 = m(i, l) + m(j, k);
          const double mx = std::max({s1, s2, s3});
          // second largest
          double second;
          if (mx == s1) second = std::max(s2, s3);
          else if (mx == s2) second = std::max(s1, s3);
          else second = std::max(s1, s2);
          const double v = mx - second;
          if (v > rep.violation) {
            rep.violation = v;
            // order the quadruple so the dominant sum reads d(x0,x2)+d(x1,x3)
            if (mx == s2) rep.worst = {i, j, k, l};
            else if (mx == s1) rep.worst = {i, k, j, l};
            else rep.worst = {i, j, l, k};
          }
        }
  rep.tree_like = rep.violation <= tol;
  return rep;
}

double metric_delta(const FiniteMetric& a, const FiniteMetric& b) {
  if (a.size() != b.size())
    fail("DimensionMismatch", "metrics have sizes " + std::to_string(a.size()) + " and " + std::to_string(b.size()));
  double d = 0.0;
  const int n = a.size();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) d = std::max(d, std::abs(a(i, j) - b(i, j)));
  return d;
}

FiniteMetric from_points(const std::vector<std::vector<double>>& points, Norm norm, double p) {
  const int n = static_cast<int>(points.size());
  if (n == 0) fail("InvalidInput", "point list is empty");
  const std::size_t dim = points[0].size();
  for (const auto& pt : points)
    if (pt.size() != dim) fail("DimensionMismatch", "points have mixed dimensions");
  if (norm == Norm::LP && !(p >= 1.0))
    fail("InvalidNorm", "lp exponent must be >= 1");

  FiniteMetric m(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double d = 0.0;
      switch (norm) {
        case Norm::L1:
          for (std::size_t a = 0; a < dim; ++a) d += std::abs(points[i][a] - points[j][a]);
          break;
        case Norm::L2: {
          double s = 0.0;
          for (std::size_t a = 0; a < dim; ++a) {
            const double t = points[i][a] - points[j][a];
            s += t * t;
          }
          d = std::sqrt(s);
          break;
        }
        case Norm::LInf:
          for (std::size_t a = 0; a < dim; ++a) d = std::max(d, std::abs(points[i][a] - points[j][a]));
          break;
        case Norm::LP: {
          double s = 0.0;
          for (std::size_t a = 0; a < dim; ++a) s += std::pow(std::abs(points[i][a] - points[j][a]), p);
          d = std::pow(s, 1.0 / p);
          break;
        }
      }
      m.set(i, j, d);
    }
  return m;
}

bool interval_contains(const FiniteMetric& m, int a, int b, int c, int d, double tol) {
  const int n = m.size();
  for (int idx : {a, b, c, d})
    if (idx < 0 || idx >= n) fail("IndexOutOfRange", "interval index " + std::to_string(idx));
  return std::abs(m(c, a) + m(a, b) + m(b, d) - m(c, d)) <= tol;
}

}  // namespace treematch
