#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <charconv>
#include <string>
#include <vector>

#include "treematch/calibration.hpp"
#include "treematch/dimension.hpp"
#include "treematch/dual.hpp"
#include "treematch/error.hpp"
#include "treematch/exact.hpp"
#include "treematch/matching.hpp"
#include "treematch/metric.hpp"
#include "treematch/tree.hpp"

namespace py = pybind11;
using namespace treematch;

namespace {

using Rows = std::vector<std::vector<double>>;

std::pair<Norm, double> parse_norm(const std::string& text) {
  if (text == "l1") return {Norm::L1, 2.0};
  if (text == "l2") return {Norm::L2, 2.0};
  if (text == "linf") return {Norm::LInf, 2.0};
  if (text.rfind("lp:", 0) == 0) {
    const std::string tail = text.substr(3);
    double p = 0.0;
    auto [ptr, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), p);
    if (ec != std::errc() || ptr != tail.data() + tail.size() || !(p >= 1.0))
      fail("InvalidNorm", "lp exponent must be a number >= 1, got '" + tail + "'");
    return {Norm::LP, p};
  }
  fail("InvalidNorm", "unknown norm '" + text + "' (use l1, l2, linf or lp:P)");
}

DimMode parse_mode(const std::string& text) {
  if (text == "exact") return DimMode::Exhaustive;
  if (text == "heuristic") return DimMode::Greedy;
  fail("InvalidInput", "mode must be exact or heuristic, got '" + text + "'");
}

FiniteMetric as_metric(const Rows& rows) { return validate_metric(rows); }

Rows metric_rows(const FiniteMetric& m) {
  Rows out(m.size(), std::vector<double>(m.size()));
  for (int i = 0; i < m.size(); ++i)
    for (int j = 0; j < m.size(); ++j) out[i][j] = m(i, j);
  return out;
}

MetricGraph as_graph(const std::vector<int>& vertices,
                     const std::vector<std::tuple<int, int, double>>& edges,
                     const std::vector<int>& terminals) {
  MetricGraph g{vertices, edges, terminals};
  validate_graph(g);
  return g;
}

PLFunction as_function(const MetricGraph& g, const std::vector<double>& values) {
  PLFunction f{values};
  validate_plfunction(g, f);
  return f;
}

Partition2 as_partition(const std::vector<int>& plus, const std::vector<int>& minus) {
  return Partition2{plus, minus};
}

py::dict matching_dict(const MatchingResult& r) {
  return py::dict(py::arg("pairs") = r.matching.pairs, py::arg("value") = r.value);
}

py::dict tree_dict(const MetricTree& t) {
  return py::dict(py::arg("vertices") = t.vertices, py::arg("edges") = t.edges,
                  py::arg("embed") = t.embed);
}

}  // namespace

PYBIND11_MODULE(_treematch, m) {
  m.doc() = "minimum matchings, tree-like dual metrics, calibrations and matching dimension";
  py::register_exception<Error>(m, "Error");

  m.def(
      "validate",
      [](const Rows& d, double tol) { return metric_rows(validate_metric(d, tol)); },
      py::arg("d"), py::arg("tol") = kTolExact,
      "Check symmetry, diagonal, nonnegativity and triangles; returns the canonical matrix.");

  m.def(
      "from_points",
      [](const Rows& points, const std::string& norm) {
        auto [n, p] = parse_norm(norm);
        return metric_rows(from_points(points, n, p));
      },
      py::arg("points"), py::arg("norm") = "l2",
      "Distance matrix of a coordinate point cloud.");

  m.def(
      "is_tree_like",
      [](const Rows& d, double tol) {
        const FourPointReport r = is_tree_like(as_metric(d), tol);
        return py::dict(py::arg("tree_like") = r.tree_like, py::arg("worst") = r.worst,
                        py::arg("violation") = r.violation);
      },
      py::arg("d"), py::arg("tol") = kTolGeom, "Exhaustive four point condition check.");

  m.def(
      "min_matching",
      [](const Rows& d) { return matching_dict(min_matching(as_metric(d))); }, py::arg("d"),
      "Minimum weight perfect matching: {'pairs', 'value'}.");

  m.def(
      "minimize_dual",
      [](const Rows& d) {
        const DualResult r = minimize_dual(as_metric(d));
        return py::dict(py::arg("D") = metric_rows(r.D), py::arg("w") = r.w,
                        py::arg("m") = r.m, py::arg("cuts") = r.cuts,
                        py::arg("tree_like") = r.tree_like);
      },
      py::arg("d"),
      "Entrywise-minimal pseudometric below d with the same matching number.");

  m.def(
      "realize_tree",
      [](const Rows& D, double tol) { return tree_dict(realize_tree(as_metric(D), tol)); },
      py::arg("D"), py::arg("tol") = kTolGeom,
      "Metric tree realizing a tree-like pseudometric: {'vertices', 'edges', 'embed'}.");

  m.def(
      "build_certificate",
      [](const Rows& d, double tol) {
        const DualCertificate c = build_certificate(as_metric(d), tol);
        return py::dict(
            py::arg("H1") = c.report.h1, py::arg("m") = c.report.m,
            py::arg("defect") = c.report.defect, py::arg("value") = c.value,
            py::arg("all_ok") = c.report.all_ok(), py::arg("D") = metric_rows(c.dual),
            py::arg("tree") = tree_dict(c.tree),
            py::arg("matching") = matching_dict({c.matching, c.value}));
      },
      py::arg("d"), py::arg("tol") = kTolGeom,
      "Dual metric, realizing tree and minimal matching, fully cross-checked.");

  m.def(
      "oriented_min_connection",
      [](const Rows& d, const std::vector<int>& plus, const std::vector<int>& minus) {
        const FiniteMetric metric = as_metric(d);
        const Partition2 pi = as_partition(plus, minus);
        validate_partition(pi, metric.size());
        const OrientedResult r = oriented_min_connection(metric, pi);
        std::vector<std::pair<int, int>> pairs;
        for (std::size_t i = 0; i < pi.plus.size(); ++i)
          pairs.emplace_back(pi.plus[i], pi.minus[r.assignment[i]]);
        return py::dict(py::arg("value") = r.value, py::arg("assignment") = pairs,
                        py::arg("potential") = kantorovich_potential(metric, pi));
      },
      py::arg("d"), py::arg("plus"), py::arg("minus"),
      "Minimal connection between the partition classes plus its potential.");

  m.def(
      "fill_z2",
      [](const std::vector<int>& vertices,
         const std::vector<std::tuple<int, int, double>>& edges,
         const std::vector<int>& terminals) {
        const MetricGraph g = as_graph(vertices, edges, terminals);
        const FillResult r = fill_z2(g);
        std::vector<std::pair<int, int>> pairs;
        for (const auto& [a, b] : r.matching.pairs)
          pairs.emplace_back(g.terminals[a], g.terminals[b]);
        return py::dict(py::arg("mass") = r.mass,
                        py::arg("matching_value") = r.matching_value,
                        py::arg("edges") = r.chain.edges, py::arg("matching") = pairs);
      },
      py::arg("vertices"), py::arg("edges"), py::arg("terminals"),
      "Mod-2 filling of the terminal set by shortest matched paths.");

  m.def(
      "lev_z2",
      [](const std::vector<int>& vertices,
         const std::vector<std::tuple<int, int, double>>& edges,
         const std::vector<int>& terminals, const std::vector<double>& values) {
        const MetricGraph g = as_graph(vertices, edges, terminals);
        return lev_z2(g, as_function(g, values));
      },
      py::arg("vertices"), py::arg("edges"), py::arg("terminals"), py::arg("values"),
      "Integral of the mod-2 cut count over the levels of a PL function.");

  m.def(
      "lev_z",
      [](const std::vector<int>& vertices,
         const std::vector<std::tuple<int, int, double>>& edges,
         const std::vector<int>& terminals, const std::vector<double>& values,
         const std::vector<int>& plus, const std::vector<int>& minus) {
        const MetricGraph g = as_graph(vertices, edges, terminals);
        const Partition2 pi = as_partition(plus, minus);
        validate_graph_partition(g, pi);
        return lev_z(g, as_function(g, values), pi);
      },
      py::arg("vertices"), py::arg("edges"), py::arg("terminals"), py::arg("values"),
      py::arg("plus"), py::arg("minus"),
      "Integral of the oriented cut count over the levels of a PL function.");

  m.def(
      "m_k",
      [](const Rows& d, int k, const std::string& mode, std::uint64_t seed) {
        const DimValue v = m_k(as_metric(d), k, parse_mode(mode), seed);
        return py::dict(py::arg("value") = v.value, py::arg("exact") = v.exact);
      },
      py::arg("d"), py::arg("k"), py::arg("mode") = "exact", py::arg("seed") = 0,
      "Largest matching number over size-k sub-multisets.");

  m.def(
      "m_eps",
      [](const Rows& d, double eps, const std::string& mode, std::uint64_t seed) {
        const DimValue v = m_eps(as_metric(d), eps, parse_mode(mode), seed);
        return py::dict(py::arg("value") = v.value, py::arg("exact") = v.exact);
      },
      py::arg("d"), py::arg("eps"), py::arg("mode") = "exact", py::arg("seed") = 0,
      "Largest matching number over eps-separated even subsets.");

  m.def(
      "comb_tree",
      [](double exponent, int count) {
        const CombTree c = comb_tree(exponent, count);
        return py::dict(py::arg("legs") = c.legs, py::arg("tips") = metric_rows(c.tips),
                        py::arg("tree") = tree_dict(c.tree));
      },
      py::arg("exponent"), py::arg("count"),
      "Star tree whose first 2k legs sum to k^((n-1)/n).");

  m.def(
      "cube_experiment",
      [](int dim, const std::vector<int>& ks, int trials, std::uint64_t seed,
         const std::string& norm) {
        auto [n, p] = parse_norm(norm);
        const ScalingSeries s = cube_experiment(dim, n, ks, trials, seed, p);
        py::list rows;
        for (const auto& row : s.rows)
          rows.append(py::dict(py::arg("k") = row.x, py::arg("value") = row.value,
                               py::arg("mode") = row.mode, py::arg("trial") = row.trial,
                               py::arg("seed") = row.seed));
        return rows;
      },
      py::arg("dim"), py::arg("ks"), py::arg("trials") = 1, py::arg("seed") = 0,
      py::arg("norm") = "l2", "Matching numbers of sampled and gridded cube point sets.");

  m.def(
      "fit_dimension",
      [](const std::vector<std::pair<double, double>>& rows) {
        ScalingSeries s;
        for (const auto& [k, value] : rows) s.rows.push_back({k, value, "exact", 0, 0});
        const DimensionFit f = fit_dimension(s);
        return py::dict(py::arg("slope") = f.slope,
                        py::arg("slope_stderr") = f.slope_stderr, py::arg("dim") = f.dim,
                        py::arg("dim_low") = f.dim_low, py::arg("dim_high") = f.dim_high,
                        py::arg("monotone") = f.monotone);
      },
      py::arg("rows"), "Log-log slope fit of (k, value) rows mapped to a dimension.");

  m.def(
      "exact_check_dual",
      [](const Rows& d, const Rows& D) {
        const ExactDualReport r =
            exact_check_dual(FiniteMetric::from_rows(d), FiniteMetric::from_rows(D));
        return py::dict(py::arg("dominated") = r.dominated,
                        py::arg("triangle_ok") = r.triangle_ok,
                        py::arg("four_point_ok") = r.four_point_ok,
                        py::arg("matching_preserved") = r.matching_preserved,
                        py::arg("worst_domination") = r.worst_domination,
                        py::arg("worst_triangle") = r.worst_triangle,
                        py::arg("worst_four_point") = r.worst_four_point,
                        py::arg("matching_gap") = r.matching_gap);
      },
      py::arg("d"), py::arg("D"), "Rational-arithmetic audit of a dual pair.");
}
