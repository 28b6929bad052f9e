#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "support/generators.hpp"
#include "treematch/dual.hpp"
#include "treematch/error.hpp"
#include "treematch/exact.hpp"
#include "treematch/matching.hpp"
#include "treematch/rng.hpp"

using namespace treematch;
using treematch::testing::random_metric;
using treematch::testing::six_point_example;

TEST_CASE("rational matching value agrees with the float dynamic program") {
  Rng rng(91);
  for (int t = 0; t < 15; ++t) {
    const FiniteMetric m = random_metric(4 + 2 * (t % 4), rng);
    const double exact = exact_min_matching_value(m);
    CHECK(exact == doctest::Approx(min_matching_oracle(m).value).epsilon(1e-12));
    CHECK(exact == doctest::Approx(min_matching(m).value).epsilon(1e-9));
  }
  CHECK(exact_min_matching_value(six_point_example(1.0)) == 4.0);
}

TEST_CASE("rational matching value guards size and parity") {
  Rng rng(92);
  const FiniteMetric odd = random_metric(5, rng);
  CHECK_THROWS_WITH_AS(exact_min_matching_value(odd), doctest::Contains("OddCardinality"),
                       Error);
  const FiniteMetric big = random_metric(18, rng);
  CHECK_THROWS_WITH_AS(exact_min_matching_value(big), doctest::Contains("TooLarge"), Error);
}

TEST_CASE("exact_is_metric accepts float-noisy triangles but not real breaks") {
  FiniteMetric line(3);
  line.set(0, 1, 0.1);
  line.set(1, 2, 0.2);
  line.set(0, 2, 0.1 + 0.2);  // rounds up, overshooting the exact sum by ~3e-17
  CHECK(exact_is_metric(line));
  CHECK(0.1 + 0.2 == 0.30000000000000004);  // doubles cannot see the residue
  CHECK_FALSE(exact_is_metric(line, 0.0));  // rationals can

  FiniteMetric broken = line;
  broken.set(0, 2, 0.2 + 0.2);
  CHECK_FALSE(exact_is_metric(broken, 1e-3));

  FiniteMetric negative(2);
  negative.set(0, 1, -1.0);
  CHECK_FALSE(exact_is_metric(negative));
}

TEST_CASE("exact audit passes dual pairs straight from the solver") {
  Rng rng(93);
  for (int t = 0; t < 4; ++t) {
    const FiniteMetric d = random_metric(6, rng);
    const DualResult r = minimize_dual(d);
    const ExactDualReport rep = exact_check_dual(d, r.D);
    CHECK(rep.dominated);
    CHECK(rep.triangle_ok);
    CHECK(rep.four_point_ok);
    CHECK(rep.matching_preserved);
    CHECK(rep.matching_gap <= 1e-6);
    CHECK(rep.worst_four_point <= 1e-6);
  }
}

TEST_CASE("exact audit pins violations the float checks could blur") {
  const FiniteMetric d = six_point_example(1.0);
  FiniteMetric D = d;
  D.set(0, 1, d(0, 1) + 1e-8);  // above the domination tolerance
  const ExactDualReport rep = exact_check_dual(d, D);
  CHECK_FALSE(rep.dominated);
  CHECK(rep.worst_domination == doctest::Approx(1e-8).epsilon(1e-6));
  CHECK(rep.triangle_ok);

  FiniteMetric T = d;
  T.set(4, 5, 0.0);  // the dual answer: still a pseudometric, matching kept
  const ExactDualReport good = exact_check_dual(d, T);
  CHECK(good.dominated);
  CHECK(good.triangle_ok);
  CHECK(good.matching_preserved);
  CHECK(good.matching_gap == 0.0);

  FiniteMetric bad = d;
  bad.set(0, 1, 5.0);  // spike above everything: triangle breaks
  const ExactDualReport spiked = exact_check_dual(d, bad);
  CHECK_FALSE(spiked.dominated);
  CHECK_FALSE(spiked.triangle_ok);
}
