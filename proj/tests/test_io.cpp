#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <clocale>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "support/generators.hpp"
#include "treematch/dual.hpp"
#include "treematch/error.hpp"
#include "treematch/io.hpp"
#include "treematch/rng.hpp"
#include "treematch/tree.hpp"

using namespace treematch;
using nlohmann::json;
using treematch::testing::random_metric;
using treematch::testing::random_tree_graph;
using treematch::testing::six_point_example;

TEST_CASE("metric json survives a dump and reparse bit for bit") {
  Rng rng(101);
  FiniteMetric m = random_metric(7, rng);
  m.set(0, 1, 0.1 + 0.2);
  m.set(2, 3, 1.0 / 3.0);
  m.set(4, 5, 3.141592653589793);
  const json j = metric_to_json(m);
  const FiniteMetric back = metric_from_json(json::parse(j.dump()));
  REQUIRE(back.size() == m.size());
  CHECK(back.flat() == m.flat());
}

TEST_CASE("metric json keeps asymmetry for the validator to reject") {
  json j = metric_to_json(six_point_example(1.0));
  j["d"][0][1] = 7.0;  // only one side
  const FiniteMetric m = metric_from_json(j);
  CHECK_THROWS_WITH_AS(validate_metric(m), doctest::Contains("AsymmetricInput"), Error);
}

TEST_CASE("metric json shape errors are input errors") {
  CHECK_THROWS_WITH_AS(metric_from_json(json{{"n", 2}}), doctest::Contains("InvalidInput"),
                       Error);
  CHECK_THROWS_WITH_AS(metric_from_json(json{{"n", 2}, {"d", json::array({1, 2})}}),
                       doctest::Contains("InvalidInput"), Error);
  json j = metric_to_json(six_point_example(1.0));
  j["d"][1] = json::array({1.0});
  CHECK_THROWS_WITH_AS(metric_from_json(j), doctest::Contains("InvalidInput"), Error);
}

TEST_CASE("matching and partition round trips") {
  MatchingResult r;
  r.matching.pairs = {{0, 3}, {1, 2}};
  r.value = 0.1 + 0.2;
  const MatchingResult r2 = matching_from_json(json::parse(matching_to_json(r).dump()));
  CHECK(r2.matching.pairs == r.matching.pairs);
  CHECK(r2.value == r.value);

  Partition2 p;
  p.plus = {0, 2};
  p.minus = {1, 3};
  const Partition2 p2 = partition_from_json(json::parse(partition_to_json(p).dump()));
  CHECK(p2.plus == p.plus);
  CHECK(p2.minus == p.minus);
}

TEST_CASE("tree json round trips through text") {
  const DualResult dr = minimize_dual(six_point_example(1.0));
  const MetricTree t = realize_tree(dr.D);
  const MetricTree t2 = tree_from_json(json::parse(tree_to_json(t).dump()));
  CHECK(t2.vertices == t.vertices);
  CHECK(t2.edges == t.edges);
  CHECK(t2.embed == t.embed);
  CHECK_NOTHROW(validate_tree(t2));

  json j = tree_to_json(t);
  j["embed"].erase("0");
  CHECK_THROWS_WITH_AS(tree_from_json(j), doctest::Contains("InvalidInput"), Error);
}

TEST_CASE("graph json carries terminals and an optional partition") {
  Rng rng(102);
  const MetricGraph g = random_tree_graph(7, 4, rng);
  Partition2 pi;
  pi.plus = {g.terminals[0], g.terminals[1]};
  pi.minus = {g.terminals[2], g.terminals[3]};

  const GraphFile plain = graph_from_json(json::parse(graph_to_json(g).dump()));
  CHECK_FALSE(plain.has_partition);
  CHECK(plain.graph.vertices == g.vertices);
  CHECK(plain.graph.edges == g.edges);
  CHECK(plain.graph.terminals == g.terminals);
  CHECK_NOTHROW(validate_graph(plain.graph));

  const GraphFile both = graph_from_json(json::parse(graph_to_json(g, &pi).dump()));
  REQUIRE(both.has_partition);
  CHECK(both.partition.plus == pi.plus);
  CHECK(both.partition.minus == pi.minus);
}

TEST_CASE("plfunction json is dense over the vertices") {
  PLFunction f;
  f.values = {0.0, 0.5, 1.0 / 3.0};
  const PLFunction f2 = plfunction_from_json(json::parse(plfunction_to_json(f).dump()), 3);
  CHECK(f2.values == f.values);
  CHECK_THROWS_WITH_AS(plfunction_from_json(plfunction_to_json(f), 4),
                       doctest::Contains("InvalidInput"), Error);
  CHECK_THROWS_WITH_AS(plfunction_from_json(plfunction_to_json(f), 2),
                       doctest::Contains("InvalidInput"), Error);
}

TEST_CASE("dual and certificate json expose the headline numbers") {
  const FiniteMetric d = six_point_example(1.0);
  const json dj = dual_to_json(minimize_dual(d));
  CHECK(dj.at("m").get<double>() == doctest::Approx(4.0));
  CHECK(dj.at("tree_like").get<bool>());
  CHECK(dj.at("D").size() == 6);

  const json cj = certificate_to_json(build_certificate(d));
  CHECK(cj.at("H1").get<double>() == doctest::Approx(4.0).epsilon(1e-6));
  CHECK(cj.at("checks").at("all_ok").get<bool>());
  const MetricTree t = tree_from_json(cj.at("tree"));
  CHECK_NOTHROW(validate_tree(t));
}

TEST_CASE("series csv round trips and uses plain dots") {
  ScalingSeries s;
  s.rows.push_back({32.0, 1.0 / 3.0, "fps", 3, 16045690984833335998ULL});
  s.rows.push_back({0.125, 2.8284271247461903, "exact", 0, 0});
  const std::string text = series_to_csv(s);
  CHECK(text.rfind("k,value,mode,trial,seed\n", 0) == 0);
  CHECK(text.find(',') != std::string::npos);
  CHECK(text.find(';') == std::string::npos);
  const ScalingSeries s2 = series_from_csv(text);
  REQUIRE(s2.rows.size() == s.rows.size());
  for (std::size_t i = 0; i < s.rows.size(); ++i) {
    CHECK(s2.rows[i].x == s.rows[i].x);
    CHECK(s2.rows[i].value == s.rows[i].value);
    CHECK(s2.rows[i].mode == s.rows[i].mode);
    CHECK(s2.rows[i].trial == s.rows[i].trial);
    CHECK(s2.rows[i].seed == s.rows[i].seed);
  }
}

TEST_CASE("point csv parses rows of coordinates") {
  const auto pts = points_from_csv("0,0\n2,0\n\n2,2\n0,2\n");
  REQUIRE(pts.size() == 4);
  CHECK(pts[1] == std::vector<double>{2.0, 0.0});
  CHECK_THROWS_WITH_AS(points_from_csv("1,2\n3\n"), doctest::Contains("InvalidInput"),
                       Error);
  CHECK_THROWS_WITH_AS(points_from_csv("a,b\n"), doctest::Contains("InvalidInput"), Error);
  CHECK_THROWS_WITH_AS(points_from_csv("\n\n"), doctest::Contains("InvalidInput"), Error);
}

TEST_CASE("double formatting is shortest, exact and locale proof") {
  CHECK(format_double(4.0) == "4");
  CHECK(format_double(0.5) == "0.5");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
  const char* loc = std::setlocale(LC_NUMERIC, "de_DE.UTF-8");
  CHECK(format_double(0.5) == "0.5");  // still a dot, whatever the locale
  if (loc != nullptr) std::setlocale(LC_NUMERIC, "C");
}

TEST_CASE("json files load or fail with input errors") {
  const std::string path = "io_test_tmp.json";
  {
    std::ofstream out(path);
    out << metric_to_json(six_point_example(1.0)).dump();
  }
  const FiniteMetric m = metric_from_json(read_json_file(path));
  CHECK(m.size() == 6);
  std::remove(path.c_str());
  CHECK_THROWS_WITH_AS(read_json_file("definitely_missing.json"),
                       doctest::Contains("InvalidInput"), Error);
  {
    std::ofstream out(path);
    out << "{not json";
  }
  CHECK_THROWS_WITH_AS(read_json_file(path), doctest::Contains("InvalidInput"), Error);
  std::remove(path.c_str());
}
