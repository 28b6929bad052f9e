#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "treematch/calibration.hpp"
#include "treematch/dimension.hpp"
#include "treematch/dual.hpp"
#include "treematch/error.hpp"
#include "treematch/exact.hpp"
#include "treematch/io.hpp"
#include "treematch/matching.hpp"
#include "treematch/metric.hpp"
#include "treematch/tree.hpp"

namespace {

using nlohmann::json;
using namespace treematch;

struct Options {
  std::string metric_file;
  std::string points_file;
  std::string graph_file;
  std::string function_file;
  std::string partition_file;
  std::string norm = "l2";
  std::string mode = "exact";
  std::string format;  // filled after parsing: csv unless --format says otherwise
  double tol = -1.0;  // negative means command default
  std::uint64_t seed = 0;
  bool exact_check = false;
  std::vector<int> k_list;
  std::vector<double> eps_list;
  int cube = 0;
  int trials = 1;
  double exponent = 2.0;
  int count = 1;
};

struct NormSpec {
  Norm norm = Norm::L2;
  double p = 2.0;
};

NormSpec parse_norm(const std::string& text) {
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

FiniteMetric load_metric(const Options& opt, double validate_tol) {
  if (opt.metric_file.empty() == opt.points_file.empty())
    fail("InvalidInput", "provide exactly one of --metric and --points");
  if (!opt.metric_file.empty())
    return validate_metric(metric_from_json(read_json_file(opt.metric_file)), validate_tol);
  const NormSpec ns = parse_norm(opt.norm);
  return validate_metric(
      from_points(points_from_csv(read_text_file(opt.points_file)), ns.norm, ns.p),
      validate_tol);
}

GraphFile load_graph(const Options& opt) {
  if (opt.graph_file.empty()) fail("InvalidInput", "--graph is required");
  GraphFile f = graph_from_json(read_json_file(opt.graph_file));
  validate_graph(f.graph);
  return f;
}

PLFunction load_function(const Options& opt, const MetricGraph& g) {
  if (opt.function_file.empty()) fail("InvalidInput", "--function is required");
  PLFunction f = plfunction_from_json(read_json_file(opt.function_file),
                                      static_cast<int>(g.vertices.size()));
  validate_plfunction(g, f);
  return f;
}

Partition2 load_graph_partition(const Options& opt, const GraphFile& gf) {
  Partition2 pi;
  if (!opt.partition_file.empty())
    pi = partition_from_json(read_json_file(opt.partition_file));
  else if (gf.has_partition)
    pi = gf.partition;
  else
    fail("InvalidPartition", "no partition: pass --partition or embed one in the graph file");
  validate_graph_partition(gf.graph, pi);
  return pi;
}

json exact_report_json(const ExactDualReport& rep) {
  return json{{"dominated", rep.dominated},
              {"triangle_ok", rep.triangle_ok},
              {"four_point_ok", rep.four_point_ok},
              {"matching_preserved", rep.matching_preserved},
              {"worst_domination", rep.worst_domination},
              {"worst_triangle", rep.worst_triangle},
              {"worst_four_point", rep.worst_four_point},
              {"matching_gap", rep.matching_gap}};
}

json series_rows_json(const ScalingSeries& s) {
  json rows = json::array();
  for (const auto& row : s.rows)
    rows.push_back(json{{"k", row.x},
                        {"value", row.value},
                        {"mode", row.mode},
                        {"trial", row.trial},
                        {"seed", row.seed}});
  return json{{"rows", std::move(rows)}};
}

void emit_json(const json& j) { std::cout << j.dump(2) << "\n"; }

void emit_series(const ScalingSeries& s, const std::string& format) {
  if (format == "csv")
    std::cout << series_to_csv(s);
  else if (format == "json")
    emit_json(series_rows_json(s));
  else
    fail("InvalidInput", "format must be json or csv, got '" + format + "'");
}

int run_validate(const Options& opt) {
  const double tol = opt.tol > 0 ? opt.tol : kTolExact;
  const FiniteMetric m = load_metric(opt, tol);
  emit_json(json{{"ok", true},
                 {"n", m.size()},
                 {"diameter", m.diameter()},
                 {"tree_like", is_tree_like(m).tree_like}});
  return 0;
}

int run_match(const Options& opt) {
  const FiniteMetric m = load_metric(opt, kTolExact);
  emit_json(matching_to_json(min_matching(m)));
  return 0;
}

int run_dualize(const Options& opt) {
  const FiniteMetric m = load_metric(opt, kTolExact);
  const DualResult r = minimize_dual(m);
  json out = dual_to_json(r);
  if (opt.exact_check) out["exact"] = exact_report_json(exact_check_dual(m, r.D));
  emit_json(out);
  return 0;
}

int run_tree(const Options& opt) {
  const double tol = opt.tol > 0 ? opt.tol : kTolGeom;
  const FiniteMetric m = load_metric(opt, kTolExact);
  const MetricTree t = realize_tree(m, tol);
  emit_json(json{{"tree", tree_to_json(t)}, {"total_length", tree_total_length(t)}});
  return 0;
}

int run_certify(const Options& opt) {
  const double tol = opt.tol > 0 ? opt.tol : kTolGeom;
  const FiniteMetric m = load_metric(opt, kTolExact);
  const DualCertificate c = build_certificate(m, tol);
  json out = certificate_to_json(c);
  if (opt.exact_check) out["exact"] = exact_report_json(exact_check_dual(c.base, c.dual));
  emit_json(out);
  return 0;
}

int run_oriented(const Options& opt) {
  const FiniteMetric m = load_metric(opt, kTolExact);
  if (opt.partition_file.empty()) fail("InvalidInput", "--partition is required");
  const Partition2 pi = partition_from_json(read_json_file(opt.partition_file));
  validate_partition(pi, m.size());
  const OrientedResult r = oriented_min_connection(m, pi);
  json pairs = json::array();
  for (std::size_t i = 0; i < pi.plus.size(); ++i)
    pairs.push_back(json::array({pi.plus[i], pi.minus[r.assignment[i]]}));
  emit_json(json{{"value", r.value},
                 {"assignment", std::move(pairs)},
                 {"potential", kantorovich_potential(m, pi)}});
  return 0;
}

int run_calib_fill(const Options& opt) {
  const GraphFile gf = load_graph(opt);
  const FillResult r = fill_z2(gf.graph);
  json pairs = json::array();
  for (const auto& [a, b] : r.matching.pairs)
    pairs.push_back(json::array({gf.graph.terminals[a], gf.graph.terminals[b]}));
  emit_json(json{{"mass", r.mass},
                 {"matching_value", r.matching_value},
                 {"edges", r.chain.edges},
                 {"matching", std::move(pairs)}});
  return 0;
}

int run_calib_lev(const Options& opt) {
  const GraphFile gf = load_graph(opt);
  const PLFunction f = load_function(opt, gf.graph);
  emit_json(json{{"value", lev_z2(gf.graph, f)}});
  return 0;
}

int run_calib_levz(const Options& opt) {
  const GraphFile gf = load_graph(opt);
  const PLFunction f = load_function(opt, gf.graph);
  const Partition2 pi = load_graph_partition(opt, gf);
  emit_json(json{{"value", lev_z(gf.graph, f, pi)}});
  return 0;
}

int run_dim_mk(const Options& opt) {
  if (opt.k_list.empty()) fail("InvalidInput", "--k is required");
  if (opt.cube > 0) {
    const NormSpec ns = parse_norm(opt.norm);
    emit_series(cube_experiment(opt.cube, ns.norm, opt.k_list, opt.trials, opt.seed, ns.p),
                opt.format);
    return 0;
  }
  const FiniteMetric m = load_metric(opt, kTolExact);
  const DimMode mode = parse_mode(opt.mode);
  ScalingSeries s;
  for (int k : opt.k_list) {
    const DimValue v = m_k(m, k, mode, opt.seed);
    s.rows.push_back({double(k), v.value, v.exact ? "exact" : "heuristic", 0, opt.seed});
  }
  emit_series(s, opt.format);
  return 0;
}

int run_dim_eps(const Options& opt) {
  if (opt.eps_list.empty()) fail("InvalidInput", "--eps is required");
  const FiniteMetric m = load_metric(opt, kTolExact);
  const DimMode mode = parse_mode(opt.mode);
  ScalingSeries s;
  for (double eps : opt.eps_list) {
    const DimValue v = m_eps(m, eps, mode, opt.seed);
    s.rows.push_back({eps, v.value, v.exact ? "exact" : "heuristic", 0, opt.seed});
  }
  emit_series(s, opt.format);
  return 0;
}

int run_comb_tree(const Options& opt) {
  const CombTree c = comb_tree(opt.exponent, opt.count);
  ScalingSeries s;
  for (int k = 1; k <= opt.count; ++k) {
    std::vector<int> head;
    for (int i = 0; i < 2 * k; ++i) head.push_back(i);
    s.rows.push_back(
        {double(k), min_matching(c.tips.restrict_to(head)).value, "exact", 0, 0});
  }
  if (opt.format == "json") {
    json out = series_rows_json(s);
    out["legs"] = c.legs;
    out["tree"] = tree_to_json(c.tree);
    emit_json(out);
  } else {
    emit_series(s, opt.format);
  }
  return 0;
}

int exit_code_for(const std::string& kind) {
  for (const char* solver : {"LPNumericalFailure", "IterationLimit", "NumericalDegeneracy",
                             "StallDetected", "InternalError", "SlopeOutOfRange"})
    if (kind == solver) return 3;
  return 2;
}

int report_error(const std::string& kind, const std::string& detail) {
  emit_json(json{{"error", json{{"kind", kind}, {"detail", detail}}}});
  return exit_code_for(kind);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"minimum matchings, tree-like dual metrics, calibrations and matching dimension"};
  app.require_subcommand(1);
  Options opt;

  auto add_metric_flags = [&](CLI::App* sub) {
    sub->add_option("--metric", opt.metric_file, "metric JSON file {\"n\", \"d\"}");
    sub->add_option("--points", opt.points_file, "point cloud CSV, one point per line");
    sub->add_option("--norm", opt.norm, "norm for --points: l1, l2, linf, lp:P");
  };

  CLI::App* validate = app.add_subcommand("validate", "check a metric and report its shape");
  add_metric_flags(validate);
  validate->add_option("--tol", opt.tol, "validation tolerance");

  CLI::App* match = app.add_subcommand("match", "minimum perfect matching value and pairs");
  add_metric_flags(match);

  CLI::App* dualize = app.add_subcommand("dualize", "tree-like dual metric with equal matching number");
  add_metric_flags(dualize);
  dualize->add_flag("--exact-check", opt.exact_check, "audit the output in rational arithmetic");

  CLI::App* tree = app.add_subcommand("tree", "realize a tree-like metric as a metric tree");
  add_metric_flags(tree);
  tree->add_option("--tol", opt.tol, "geometry tolerance");

  CLI::App* certify = app.add_subcommand("certify", "dual metric, tree and matching certificate");
  add_metric_flags(certify);
  certify->add_option("--tol", opt.tol, "geometry tolerance");
  certify->add_flag("--exact-check", opt.exact_check, "audit the dual pair in rational arithmetic");

  CLI::App* oriented = app.add_subcommand("oriented", "minimal connection of a two-class partition");
  add_metric_flags(oriented);
  oriented->add_option("--partition", opt.partition_file, "partition JSON {\"plus\", \"minus\"}");

  CLI::App* calib_fill = app.add_subcommand("calib-fill", "mod-2 filling of the terminals of a graph");
  calib_fill->add_option("--graph", opt.graph_file, "graph JSON file")->required();

  CLI::App* calib_lev = app.add_subcommand("calib-lev", "mod-2 level value of a PL function");
  calib_lev->add_option("--graph", opt.graph_file, "graph JSON file")->required();
  calib_lev->add_option("--function", opt.function_file, "PL function JSON {\"values\"}")->required();

  CLI::App* calib_levz = app.add_subcommand("calib-levz", "oriented level value of a PL function");
  calib_levz->add_option("--graph", opt.graph_file, "graph JSON file")->required();
  calib_levz->add_option("--function", opt.function_file, "PL function JSON {\"values\"}")->required();
  calib_levz->add_option("--partition", opt.partition_file, "partition JSON over terminal vertices");

  CLI::App* dim_mk = app.add_subcommand("dim-mk", "subset matching numbers m_k");
  add_metric_flags(dim_mk);
  dim_mk->add_option("--k", opt.k_list, "even subset sizes")->delimiter(',');
  dim_mk->add_option("--mode", opt.mode, "exact or heuristic");
  dim_mk->add_option("--seed", opt.seed, "seed for heuristic restarts");
  dim_mk->add_option("--cube", opt.cube, "sample [0,1]^D instead of reading a metric");
  dim_mk->add_option("--trials", opt.trials, "trials per k in cube mode");
  dim_mk->add_option("--format", opt.format, "json or csv")->default_str("csv");

  CLI::App* dim_eps = app.add_subcommand("dim-eps", "separated subset matching numbers");
  add_metric_flags(dim_eps);
  dim_eps->add_option("--eps", opt.eps_list, "separation thresholds")->delimiter(',');
  dim_eps->add_option("--mode", opt.mode, "exact or heuristic");
  dim_eps->add_option("--seed", opt.seed, "seed for heuristic restarts");
  dim_eps->add_option("--format", opt.format, "json or csv")->default_str("csv");

  CLI::App* comb = app.add_subcommand("comb-tree", "comb tree profile and tip matchings");
  comb->add_option("--exponent", opt.exponent, "profile exponent, at least 1")->required();
  comb->add_option("--count", opt.count, "number of profile steps K")->required();
  comb->add_option("--format", opt.format, "json or csv")->default_str("csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    std::cout << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    return report_error("InvalidInput", e.what());
  }

  if (opt.format.empty()) opt.format = "csv";

  try {
    if (validate->parsed()) return run_validate(opt);
    if (match->parsed()) return run_match(opt);
    if (dualize->parsed()) return run_dualize(opt);
    if (tree->parsed()) return run_tree(opt);
    if (certify->parsed()) return run_certify(opt);
    if (oriented->parsed()) return run_oriented(opt);
    if (calib_fill->parsed()) return run_calib_fill(opt);
    if (calib_lev->parsed()) return run_calib_lev(opt);
    if (calib_levz->parsed()) return run_calib_levz(opt);
    if (dim_mk->parsed()) return run_dim_mk(opt);
    if (dim_eps->parsed()) return run_dim_eps(opt);
    if (comb->parsed()) return run_comb_tree(opt);
    fail("InvalidInput", "no subcommand given");
  } catch (const Error& e) {
    const std::string prefix = e.kind() + ": ";
    std::string detail = e.what();
    if (detail.rfind(prefix, 0) == 0) detail = detail.substr(prefix.size());
    return report_error(e.kind(), detail);
  } catch (const std::exception& e) {
    return report_error("InternalError", e.what());
  }
  return 0;
}
