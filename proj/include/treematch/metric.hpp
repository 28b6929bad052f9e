#pragma once

#include <array>
#include <span>
#include <vector>

namespace treematch {

// Comparison tolerance for solver-grade equalities.
inline constexpr double kTolExact = 1e-9;
// Comparison tolerance for derived geometric checks (tree shape, four point).
inline constexpr double kTolGeom = 1e-6;

// Finite pseudometric space on points {0, ..., n-1}, dense row-major storage.
class FiniteMetric {
 public:
  FiniteMetric() = default;
  explicit FiniteMetric(int n) : n_(n), d_(static_cast<std::size_t>(n) * n, 0.0) {}

  // Shape-checked but otherwise unvalidated construction.
  static FiniteMetric from_rows(const std::vector<std::vector<double>>& rows);
  static FiniteMetric from_flat(int n, std::vector<double> flat);

  int size() const { return n_; }

  double operator()(int i, int j) const {
    return d_[static_cast<std::size_t>(i) * n_ + j];
  }

  // Sets both (i, j) and (j, i).
  void set(int i, int j, double v) {
    d_[static_cast<std::size_t>(i) * n_ + j] = v;
    d_[static_cast<std::size_t>(j) * n_ + i] = v;
  }

  const std::vector<double>& flat() const { return d_; }

  double diameter() const;

  // Sum of d(i, j) over unordered pairs i < j.
  double pair_sum() const;

  // Sub-multiset restriction; indices may repeat and order is kept.
  FiniteMetric restrict_to(std::span<const int> indices) const;

 private:
  int n_ = 0;
  std::vector<double> d_;
};

struct TriangleCheck {
  bool ok = true;
  int i = -1, j = -1, k = -1;  // worst violated d(i,j) <= d(i,k) + d(k,j)
  double violation = 0.0;
};

// Worst triangle violation over all ordered triples; violation <= 0 means none.
TriangleCheck worst_triangle_violation(const FiniteMetric& m);

// Checks symmetry, zero diagonal, nonnegativity and the triangle inequality,
// then returns a canonicalized copy (diagonal zeroed, tiny negatives clamped,
// symmetrized). Throws Error on failure.
FiniteMetric validate_metric(const FiniteMetric& m, double tol = kTolExact);
FiniteMetric validate_metric(const std::vector<std::vector<double>>& rows,
                             double tol = kTolExact);

struct FourPointReport {
  bool tree_like = true;
  // Worst quadruple, ordered so that d(x[0],x[2]) + d(x[1],x[3]) is the
  // strictly largest of the three pair sums.
  std::array<int, 4> worst = {-1, -1, -1, -1};
  double violation = 0.0;  // largest sum minus second largest
};

// Four-point condition: for every quadruple the maximum of the three pair
// sums is attained at least twice (within tol). Exhaustive O(n^4).
FourPointReport is_tree_like(const FiniteMetric& m, double tol = kTolGeom);

// Max absolute entrywise difference; throws DimensionMismatch.
double metric_delta(const FiniteMetric& a, const FiniteMetric& b);

enum class Norm { L1, L2, LInf, LP };

// Metric induced on a list of coordinate points; all points must share one
// dimension. For Norm::LP the exponent p must be >= 1.
FiniteMetric from_points(const std::vector<std::vector<double>>& points,
                         Norm norm = Norm::L2, double p = 2.0);

// Interval relation [a,b] subset of [c,d]:
//   d(c,a) + d(a,b) + d(b,d) == d(c,d) within tol.
bool interval_contains(const FiniteMetric& m, int a, int b, int c, int d,
                       double tol = kTolExact);

}  // namespace treematch
