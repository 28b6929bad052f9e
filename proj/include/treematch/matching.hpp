#pragma once

#include <set>
#include <utility>
#include <vector>

#include "treematch/metric.hpp"

namespace treematch {

// Perfect matching as unordered pairs, normalized to i < j and sorted by
// first element.
struct Matching {
  std::vector<std::pair<int, int>> pairs;
};

struct MatchingResult {
  Matching matching;
  double value = 0.0;
};

// Balanced two-coloring of {0, ..., n-1}.
struct Partition2 {
  std::vector<int> plus;
  std::vector<int> minus;
};

void validate_matching(const Matching& m, int n);
void validate_partition(const Partition2& p, int n);

double matching_value(const FiniteMetric& m, const Matching& pi);

// Minimum weight perfect matching value m(X, d); exact blossom solver.
// Requires even n >= 2.
MatchingResult min_matching(const FiniteMetric& m);

// Independent ground truth: subset dynamic program, O(n * 2^n), n <= 22.
MatchingResult min_matching_oracle(const FiniteMetric& m);

// All perfect matchings with value <= m(X, d) + tol, n <= 12, in
// lexicographic order.
std::vector<Matching> enumerate_min_matchings(const FiniteMetric& m,
                                              double tol = kTolExact);

// Union of the pairs over all minimal matchings (the set P(d)).
std::set<std::pair<int, int>> minimal_pairs(const FiniteMetric& m,
                                            double tol = kTolExact);

struct OrientedResult {
  // assignment[i] = index into partition.minus matched with partition.plus[i]
  std::vector<int> assignment;
  double value = 0.0;
};

// Minimum cost perfect bipartite matching between the two classes of the
// partition (Hungarian algorithm).
OrientedResult oriented_min_connection(const FiniteMetric& m, const Partition2& p);

// A 1-Lipschitz function f on all points with
//   sum f(plus) - sum f(minus) = oriented_min_connection value,
// normalized so f = 0 at the smallest index of the plus class.
std::vector<double> kantorovich_potential(const FiniteMetric& m, const Partition2& p);

struct SwapCheck {
  bool locally_minimal = true;
  std::pair<int, int> drop_a{-1, -1}, drop_b{-1, -1};  // pairs removed
  std::pair<int, int> add_a{-1, -1}, add_b{-1, -1};    // pairs inserted
  double improvement = 0.0;                            // old value - new value
};

// Tests 2-swap local minimality; reports the most improving swap if any.
SwapCheck is_locally_minimal_2swap(const FiniteMetric& m, const Matching& pi,
                                   double tol = kTolExact);

}  // namespace treematch
