#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "support/generators.hpp"
#include "treematch/dual.hpp"
#include "treematch/error.hpp"
#include "treematch/matching.hpp"
#include "treematch/rng.hpp"

using namespace treematch;
using treematch::testing::random_euclidean;
using treematch::testing::random_metric;
using treematch::testing::six_point_example;

namespace {

FiniteMetric line_metric(const std::vector<double>& xs) {
  const int n = static_cast<int>(xs.size());
  FiniteMetric m(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) m.set(i, j, std::abs(xs[i] - xs[j]));
  return validate_metric(m);
}

}  // namespace

TEST_CASE("dualizing the six point example zeroes exactly the hub pair") {
  const FiniteMetric d = six_point_example(1.0);
  const DualResult r = minimize_dual(d);
  CHECK(r.m == doctest::Approx(4.0));
  CHECK(r.D(4, 5) == doctest::Approx(0.0).epsilon(1e-6));
  for (int i = 0; i < 6; ++i)
    for (int j = i + 1; j < 6; ++j)
      if (!(i == 4 && j == 5)) CHECK(r.D(i, j) == doctest::Approx(d(i, j)).epsilon(1e-6));
  CHECK(r.w == doctest::Approx(d.pair_sum() - 1.0).epsilon(1e-6));
  CHECK(r.tree_like);
  CHECK(r.cuts >= 1);
}

TEST_CASE("four equidistant points already sit at the optimum") {
  FiniteMetric flat(4);
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) flat.set(i, j, 1.0);
  const DualResult r = minimize_dual(flat);
  CHECK(r.w == doctest::Approx(6.0));
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) CHECK(r.D(i, j) == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("four points on a line dualize to total weight six") {
  // every pair sits in one of the three perfect matchings, each cut forces
  // a sum of two, so the optimum weight is exactly six
  const FiniteMetric d = line_metric({0.0, 1.0, 2.0, 3.0});
  const DualResult r = minimize_dual(d);
  CHECK(r.w == doctest::Approx(6.0).epsilon(1e-7));
  CHECK(r.m == doctest::Approx(2.0).epsilon(1e-7));
  const DualCheck chk = verify_dual(d, r.D);
  CHECK(chk.dominated);
  CHECK(chk.triangle_ok);
  CHECK(chk.matching_preserved);
}

TEST_CASE("random spaces keep domination triangle and matching number") {
  Rng rng(31);
  for (int trial = 0; trial < 24; ++trial) {
    const int n = 2 * rng.uniform_int(2, 5);  // 4..10
    const FiniteMetric d =
        (trial % 2 == 0) ? random_metric(n, rng) : random_euclidean(n, 2, rng);
    const DualResult r = minimize_dual(d);
    const DualCheck chk = verify_dual(d, r.D);
    CHECK(chk.worst_domination <= 1e-9);
    CHECK(chk.worst_triangle <= 1e-7);
    CHECK(chk.matching_gap <= 1e-6);
    CHECK(r.w <= d.pair_sum() + 1e-9);
  }
}

TEST_CASE("after dualizing every pair joins some minimum matching") {
  Rng rng(47);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 2 * rng.uniform_int(2, 4);  // 4..8
    const FiniteMetric d =
        (trial % 2 == 0) ? random_metric(n, rng) : random_euclidean(n, 2, rng);
    const DualResult r = minimize_dual(d);
    const auto pairs = minimal_pairs(r.D, 1e-6);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) REQUIRE(pairs.count({i, j}) == 1);
  }
}

TEST_CASE("a twelve point space stays within budget") {
  Rng rng(53);
  const FiniteMetric d = random_metric(12, rng);
  const DualResult r = minimize_dual(d);
  const DualCheck chk = verify_dual(d, r.D);
  CHECK(chk.worst_domination <= 1e-9);
  CHECK(chk.worst_triangle <= 1e-6);
  CHECK(chk.matching_gap <= 1e-6);
  CHECK(r.tree_like);
}

TEST_CASE("dualize rejects odd and oversized spaces") {
  const FiniteMetric odd = validate_metric({{0, 1, 1}, {1, 0, 1}, {1, 1, 0}});
  CHECK_THROWS_WITH_AS(minimize_dual(odd), doctest::Contains("OddCardinality"), Error);
  FiniteMetric big(16);
  for (int i = 0; i < 16; ++i)
    for (int j = i + 1; j < 16; ++j) big.set(i, j, 1.0);
  CHECK_THROWS_WITH_AS(minimize_dual(big), doctest::Contains("TooLarge"), Error);
}

TEST_CASE("descent reaches a tree-like dominated metric with the same matching number") {
  Rng rng(61);
  for (int trial = 0; trial < 8; ++trial) {
    const int n = 2 * rng.uniform_int(2, 3);  // 4 or 6
    const FiniteMetric d =
        (trial % 2 == 0) ? random_metric(n, rng) : random_euclidean(n, 2, rng);
    const FiniteMetric D = dual_via_descent(d);
    const DualCheck chk = verify_dual(d, D);
    CHECK(chk.dominated);
    CHECK(chk.triangle_ok);
    CHECK(chk.matching_gap <= 1e-6);
    CHECK(chk.tree_like);
    // descent cannot beat the linear program
    CHECK(D.pair_sum() >= minimize_dual(d).w - 1e-6);
  }
}

TEST_CASE("descent on the six point example also zeroes the hub pair") {
  const FiniteMetric d = six_point_example(1.0);
  const FiniteMetric D = dual_via_descent(d);
  CHECK(D(4, 5) == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(min_matching(D).value == doctest::Approx(4.0).epsilon(1e-6));
}
