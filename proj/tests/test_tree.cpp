#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>
#include <vector>

#include "support/generators.hpp"
#include "treematch/dual.hpp"
#include "treematch/error.hpp"
#include "treematch/matching.hpp"
#include "treematch/tree.hpp"

using namespace treematch;
using treematch::testing::random_metric;
using treematch::testing::random_tree_metric;
using treematch::testing::six_point_example;

namespace {

FiniteMetric star_dual() {
  // six point dual with the hub pair collapsed
  FiniteMetric m(6);
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) m.set(i, j, 2.0);
  for (int i = 0; i < 4; ++i) {
    m.set(i, 4, 1.0);
    m.set(i, 5, 1.0);
  }
  m.set(4, 5, 0.0);
  return validate_metric(m);
}

std::set<int> covered_edges(const PathSet& paths) {
  std::set<int> out;
  for (const auto& a : paths.arcs) out.insert(a.begin(), a.end());
  return out;
}

}  // namespace

TEST_CASE("two points realize as a single edge") {
  FiniteMetric d(2);
  d.set(0, 1, 5.0);
  MetricTree t = realize_tree(d);
  CHECK(t.vertices.size() == 2);
  CHECK(t.edges.size() == 1);
  CHECK(tree_total_length(t) == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(t.embed[0] != t.embed[1]);
}

TEST_CASE("single class collapses to one vertex") {
  FiniteMetric d(3);
  MetricTree t = realize_tree(d);
  CHECK(t.vertices.size() == 1);
  CHECK(t.edges.empty());
  CHECK(tree_total_length(t) == 0.0);
  CHECK(t.embed == std::vector<int>{0, 0, 0});
}

TEST_CASE("collapsed six point dual realizes as a star") {
  MetricTree t = realize_tree(star_dual());
  CHECK(t.vertices.size() == 5);
  CHECK(t.edges.size() == 4);
  CHECK(tree_total_length(t) == doctest::Approx(4.0).epsilon(1e-9));
  CHECK(t.embed[4] == t.embed[5]);
  FiniteMetric back = tree_metric_on_embedded(t);
  CHECK(metric_delta(back, star_dual()) <= 1e-9);
}

TEST_CASE("unit line realizes as a path") {
  FiniteMetric d(4);
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) d.set(i, j, static_cast<double>(j - i));
  MetricTree t = realize_tree(d);
  CHECK(t.vertices.size() == 4);
  CHECK(t.edges.size() == 3);
  CHECK(tree_total_length(t) == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(metric_delta(tree_metric_on_embedded(t), d) <= 1e-9);
}

TEST_CASE("square corners are rejected as not tree-like") {
  FiniteMetric d = from_points({{0, 0}, {1, 0}, {0, 1}, {1, 1}}, Norm::L2);
  CHECK_THROWS_WITH_AS(realize_tree(d), doctest::Contains("NotTreeLike"),
                       Error);
}

TEST_CASE("generated trees are reproduced exactly") {
  Rng rng(41);
  for (int trial = 0; trial < 60; ++trial) {
    int n = rng.uniform_int(2, 12);
    auto inst = random_tree_metric(n, rng);
    MetricTree t = realize_tree(inst.metric);
    CHECK(metric_delta(tree_metric_on_embedded(t), inst.metric) <= 1e-9);
    CHECK(tree_total_length(t) == doctest::Approx(inst.total_length).epsilon(1e-9));
  }
}

TEST_CASE("dual metrics of random instances realize within tolerance") {
  Rng rng(42);
  for (int trial = 0; trial < 10; ++trial) {
    int n = 4 + 2 * rng.uniform_int(0, 3);
    FiniteMetric d = random_metric(n, rng);
    DualResult dual = minimize_dual(d);
    MetricTree t = realize_tree(dual.D);
    CHECK(metric_delta(tree_metric_on_embedded(t), dual.D) <= 1e-6);
  }
}

TEST_CASE("matching paths use edge ids and collapse zero pairs") {
  MetricTree t = realize_tree(star_dual());
  Matching pi;
  pi.pairs = {{4, 5}, {0, 1}, {2, 3}};
  PathSet paths = matching_paths(t, pi);
  REQUIRE(paths.arcs.size() == 3);
  CHECK(paths.arcs[0].empty());
  CHECK(paths.arcs[1].size() == 2);
  CHECK(paths.arcs[2].size() == 2);
  std::set<int> all = covered_edges(paths);
  CHECK(all.size() == 4);
}

TEST_CASE("validate_tree rejects malformed trees") {
  MetricTree cyc;
  cyc.vertices = {0, 1, 2};
  cyc.edges = {{0, 1, 1.0}, {1, 2, 1.0}, {2, 0, 1.0}};
  CHECK_THROWS_WITH_AS(validate_tree(cyc), doctest::Contains("InvalidInput"),
                       Error);

  MetricTree neg;
  neg.vertices = {0, 1};
  neg.edges = {{0, 1, -2.0}};
  CHECK_THROWS_WITH_AS(validate_tree(neg), doctest::Contains("InvalidInput"),
                       Error);

  MetricTree split;
  split.vertices = {0, 1, 2, 3};
  split.edges = {{0, 1, 1.0}, {1, 0, 1.0}, {2, 3, 1.0}};
  CHECK_THROWS_WITH_AS(validate_tree(split), doctest::Contains("InvalidInput"),
                       Error);
}

TEST_CASE("six point certificate carries every flag") {
  DualCertificate cert = build_certificate(six_point_example(1.0));
  CHECK(cert.value == doctest::Approx(4.0).epsilon(1e-9));
  CHECK(cert.report.pair_isometry);
  CHECK(cert.report.path_overlap_le_point);
  CHECK(cert.report.coverage);
  CHECK(cert.report.parity_odd);
  CHECK(cert.report.h1 == doctest::Approx(4.0).epsilon(1e-6));
  CHECK(cert.report.m == doctest::Approx(4.0).epsilon(1e-9));
  CHECK(cert.report.defect <= 1e-6);
}

TEST_CASE("square corner certificate matches the hand value") {
  FiniteMetric d = from_points({{0, 0}, {1, 0}, {0, 1}, {1, 1}}, Norm::L2);
  DualCertificate cert = build_certificate(d);
  CHECK(cert.value == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(cert.report.all_ok());
  CHECK(cert.report.defect <= 1e-6);
}

TEST_CASE("random certificates verify end to end") {
  Rng rng(43);
  for (int trial = 0; trial < 8; ++trial) {
    int n = 4 + 2 * rng.uniform_int(0, 2);
    FiniteMetric d = random_metric(n, rng);
    DualCertificate cert = build_certificate(d);
    CAPTURE(trial);
    CHECK(cert.report.pair_isometry);
    CHECK(cert.report.path_overlap_le_point);
    CHECK(cert.report.coverage);
    CHECK(cert.report.parity_odd);
    CHECK(cert.report.defect <= 1e-6);
  }
}

TEST_CASE("covered region is the same for every minimal matching") {
  Rng rng(44);
  for (int trial = 0; trial < 6; ++trial) {
    int n = (trial % 2 == 0) ? 6 : 8;
    FiniteMetric d = random_metric(n, rng);
    DualResult dual = minimize_dual(d);
    MetricTree t = realize_tree(dual.D);
    double h1 = tree_total_length(t);
    auto minimal = enumerate_min_matchings(d);
    REQUIRE(!minimal.empty());
    for (const auto& pi : minimal) {
      PathSet paths = matching_paths(t, pi);
      double covered = 0.0;
      for (int e : covered_edges(paths)) covered += std::get<2>(t.edges[e]);
      CHECK(covered == doctest::Approx(h1).epsilon(1e-6));
    }
  }
}
