#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "support/generators.hpp"
#include "treematch/error.hpp"
#include "treematch/matching.hpp"
#include "treematch/rng.hpp"

using namespace treematch;
using treematch::testing::random_euclidean;
using treematch::testing::random_metric;

namespace {

FiniteMetric line_metric(const std::vector<double>& xs) {
  std::vector<std::vector<double>> rows(xs.size(), std::vector<double>(xs.size()));
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = 0; j < xs.size(); ++j) rows[i][j] = std::abs(xs[i] - xs[j]);
  return validate_metric(rows);
}

}  // namespace

using treematch::testing::six_point_example;

TEST_CASE("blossom agrees with the subset oracle on random metrics") {
  Rng rng(11);
  for (int trial = 0; trial < 160; ++trial) {
    const int n = 2 * rng.uniform_int(1, 6);  // 2..12
    const FiniteMetric m = (trial % 2 == 0) ? random_metric(std::max(n, 2), rng)
                                            : random_euclidean(std::max(n, 2), 2, rng);
    const MatchingResult fast = min_matching(m);
    const MatchingResult slow = min_matching_oracle(m);
    REQUIRE(fast.value == doctest::Approx(slow.value).epsilon(1e-12));
    CHECK(matching_value(m, fast.matching) == doctest::Approx(fast.value));
    CHECK_NOTHROW(validate_matching(fast.matching, m.size()));
  }
}

TEST_CASE("blossom handles massively tied instances") {
  // all pairwise distances equal: every matching is optimal
  FiniteMetric flat(10);
  for (int i = 0; i < 10; ++i)
    for (int j = i + 1; j < 10; ++j) flat.set(i, j, 1.0);
  CHECK(min_matching(flat).value == doctest::Approx(5.0));

  // pseudometric with zero-distance pairs
  FiniteMetric z(6);
  for (int i = 0; i < 6; ++i)
    for (int j = i + 1; j < 6; ++j) z.set(i, j, (j - i) % 2 == 0 ? 0.0 : 1.0);
  const MatchingResult r = min_matching(validate_metric(z));
  CHECK(r.value == doctest::Approx(min_matching_oracle(validate_metric(z)).value));
}

TEST_CASE("matching rejects odd cardinality") {
  const FiniteMetric m = validate_metric({{0, 1, 1}, {1, 0, 1}, {1, 1, 0}});
  CHECK_THROWS_WITH_AS(min_matching(m), doctest::Contains("OddCardinality"), Error);
  CHECK_THROWS_WITH_AS(min_matching_oracle(m), doctest::Contains("OddCardinality"), Error);
}

TEST_CASE("six point example has matching number 4 and its minimal matchings avoid the center pair") {
  const FiniteMetric m = six_point_example(1.0);
  const MatchingResult r = min_matching(m);
  CHECK(r.value == doctest::Approx(4.0));
  const auto all = enumerate_min_matchings(m, 1e-9);
  CHECK(all.size() == 12);  // pair the centers with two tips, tips with each other
  for (const Matching& pi : all) {
    const bool has_center_pair =
        std::find(pi.pairs.begin(), pi.pairs.end(), std::make_pair(4, 5)) != pi.pairs.end();
    CHECK_FALSE(has_center_pair);
  }
  const auto pairs = minimal_pairs(m, 1e-9);
  CHECK(pairs.count({4, 5}) == 0);
  CHECK(pairs.count({0, 4}) == 1);
  CHECK(pairs.count({0, 1}) == 1);
}

TEST_CASE("enumeration is exhaustive and lexicographic on small instances") {
  FiniteMetric flat(6);
  for (int i = 0; i < 6; ++i)
    for (int j = i + 1; j < 6; ++j) flat.set(i, j, 2.0);
  const auto all = enumerate_min_matchings(flat, 1e-9);
  CHECK(all.size() == 15);  // all perfect matchings on 6 points
  CHECK(std::is_sorted(all.begin(), all.end(), [](const Matching& a, const Matching& b) {
    return a.pairs < b.pairs;
  }));
  // blossom solution appears in the enumerated list
  const MatchingResult r = min_matching(flat);
  CHECK(std::any_of(all.begin(), all.end(),
                    [&](const Matching& pi) { return pi.pairs == r.matching.pairs; }));
}

TEST_CASE("enumeration guards its size limit") {
  Rng rng(3);
  const FiniteMetric m = random_metric(14, rng);
  CHECK_THROWS_WITH_AS(enumerate_min_matchings(m), doctest::Contains("TooLarge"), Error);
}

TEST_CASE("minimal pair sets are invariant under scaling") {
  Rng rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const FiniteMetric m = random_metric(8, rng);
    FiniteMetric scaled(8);
    for (int i = 0; i < 8; ++i)
      for (int j = i + 1; j < 8; ++j) scaled.set(i, j, 3.5 * m(i, j));
    CHECK(minimal_pairs(m, 1e-9) == minimal_pairs(scaled, 3.5e-9));
  }
}

TEST_CASE("oriented connection matches the unsigned matching on two points") {
  const FiniteMetric m = line_metric({0.0, 2.5});
  const Partition2 p{{0}, {1}};
  const OrientedResult r = oriented_min_connection(m, p);
  CHECK(r.value == doctest::Approx(2.5));
  CHECK(r.assignment == std::vector<int>{0});
}

TEST_CASE("oriented connection dominates the unsigned matching number") {
  Rng rng(23);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 * rng.uniform_int(2, 5);
    const FiniteMetric m = random_metric(n, rng);
    // random balanced partition
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    for (int i = n - 1; i > 0; --i) std::swap(idx[i], idx[rng.uniform_int(0, i)]);
    Partition2 p;
    p.plus.assign(idx.begin(), idx.begin() + n / 2);
    p.minus.assign(idx.begin() + n / 2, idx.end());
    const OrientedResult r = oriented_min_connection(m, p);
    CHECK(r.value >= min_matching(m).value - 1e-9);
  }
}

TEST_CASE("oriented connection equals brute force over permutations") {
  Rng rng(29);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 * rng.uniform_int(2, 4);  // 4, 6, 8
    const FiniteMetric m = random_metric(n, rng);
    Partition2 p;
    for (int i = 0; i < n; ++i) (i % 2 == 0 ? p.plus : p.minus).push_back(i);
    const OrientedResult r = oriented_min_connection(m, p);
    std::vector<int> perm(p.minus.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<int>(i);
    double best = std::numeric_limits<double>::infinity();
    do {
      double tot = 0.0;
      for (std::size_t i = 0; i < perm.size(); ++i) tot += m(p.plus[i], p.minus[perm[i]]);
      best = std::min(best, tot);
    } while (std::next_permutation(perm.begin(), perm.end()));
    CHECK(r.value == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("kantorovich potential is 1-Lipschitz, achieves the gap, and is anchored") {
  Rng rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 * rng.uniform_int(2, 5);
    const FiniteMetric m = (trial % 2 == 0) ? random_metric(n, rng) : random_euclidean(n, 2, rng);
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    for (int i = n - 1; i > 0; --i) std::swap(idx[i], idx[rng.uniform_int(0, i)]);
    Partition2 p;
    p.plus.assign(idx.begin(), idx.begin() + n / 2);
    p.minus.assign(idx.begin() + n / 2, idx.end());

    const std::vector<double> f = kantorovich_potential(m, p);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) CHECK(std::abs(f[i] - f[j]) <= m(i, j) + 1e-9);
    double gap = 0.0;
    for (int v : p.plus) gap += f[v];
    for (int v : p.minus) gap -= f[v];
    const OrientedResult r = oriented_min_connection(m, p);
    CHECK(gap == doctest::Approx(r.value).epsilon(1e-10));
    CHECK(f[*std::min_element(p.plus.begin(), p.plus.end())] == 0.0);
  }
}

TEST_CASE("partition validation rejects unbalanced or overlapping classes") {
  const FiniteMetric m = validate_metric({{0, 1}, {1, 0}});
  CHECK_THROWS_WITH_AS(oriented_min_connection(m, Partition2{{0, 1}, {}}),
                       doctest::Contains("InvalidPartition"), Error);
  CHECK_THROWS_WITH_AS(oriented_min_connection(m, Partition2{{0}, {0}}),
                       doctest::Contains("InvalidPartition"), Error);
}

TEST_CASE("geometric truncation pairing zero with the farthest point is not 2-swap minimal") {
  for (int N : {3, 5, 7}) {
    // {0} union {2^-i : 0 <= i <= N}, padded with a duplicate of 0 to even size
    std::vector<double> xs;
    for (int i = 0; i <= N; ++i) xs.push_back(std::ldexp(1.0, -i));
    xs.push_back(0.0);
    if (xs.size() % 2 != 0) xs.push_back(0.0);
    const FiniteMetric m = line_metric(xs);

    // pair 0 with the farthest point, then consecutive points
    Matching pi;
    const int zero = static_cast<int>(xs.size()) - (xs.size() % 2 == 0 ? 2 : 1);
    pi.pairs.emplace_back(0, zero);
    std::vector<int> rest;
    for (int i = 1; i < static_cast<int>(xs.size()); ++i)
      if (i != zero) rest.push_back(i);
    for (std::size_t i = 0; i + 1 < rest.size(); i += 2) pi.pairs.emplace_back(rest[i], rest[i + 1]);
    std::sort(pi.pairs.begin(), pi.pairs.end());

    const SwapCheck sc = is_locally_minimal_2swap(m, pi);
    CHECK_FALSE(sc.locally_minimal);
    CHECK(sc.improvement > 0.0);
    // the reported swap actually improves the matching value
    Matching swapped = pi;
    for (auto& pr : swapped.pairs) {
      if (pr == sc.drop_a) pr = sc.add_a;
      else if (pr == sc.drop_b) pr = sc.add_b;
    }
    for (auto& [a, b] : swapped.pairs)
      if (a > b) std::swap(a, b);
    std::sort(swapped.pairs.begin(), swapped.pairs.end());
    CHECK_NOTHROW(validate_matching(swapped, m.size()));
    CHECK(matching_value(m, swapped) == doctest::Approx(matching_value(m, pi) - sc.improvement));
  }
}

TEST_CASE("optimal matchings are 2-swap minimal") {
  Rng rng(41);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 2 * rng.uniform_int(2, 5);
    const FiniteMetric m = random_metric(n, rng);
    const MatchingResult r = min_matching(m);
    CHECK(is_locally_minimal_2swap(m, r.matching).locally_minimal);
  }
}

TEST_CASE("blossom scales to the sizes used by the experiments") {
  Rng rng(59);
  const FiniteMetric m = random_euclidean(256, 2, rng);
  const MatchingResult r = min_matching(m);
  CHECK(r.matching.pairs.size() == 128);
  CHECK(r.value > 0.0);
  // sanity: local minimality of the blossom output on a big instance
  CHECK(is_locally_minimal_2swap(m, r.matching).locally_minimal);
}
