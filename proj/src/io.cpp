#include "treematch/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include "treematch/error.hpp"

namespace treematch {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& detail) { fail("InvalidInput", detail); }

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) bad(std::string("missing field '") + key + "'");
  return j.at(key);
}

int as_int(const json& j, const char* what) {
  if (!j.is_number_integer()) bad(std::string(what) + " must be an integer");
  return j.get<int>();
}

double as_double(const json& j, const char* what) {
  if (!j.is_number()) bad(std::string(what) + " must be a number");
  return j.get<double>();
}

std::vector<int> as_int_list(const json& j, const char* what) {
  if (!j.is_array()) bad(std::string(what) + " must be an array");
  std::vector<int> out;
  out.reserve(j.size());
  for (const auto& e : j) out.push_back(as_int(e, what));
  return out;
}

std::vector<std::tuple<int, int, double>> as_edges(const json& j) {
  if (!j.is_array()) bad("'edges' must be an array");
  std::vector<std::tuple<int, int, double>> out;
  out.reserve(j.size());
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 3) bad("each edge must be [u, v, length]");
    out.emplace_back(as_int(e[0], "edge endpoint"), as_int(e[1], "edge endpoint"),
                     as_double(e[2], "edge length"));
  }
  return out;
}

json edges_to_json(const std::vector<std::tuple<int, int, double>>& edges) {
  json out = json::array();
  for (const auto& [u, v, len] : edges) out.push_back(json::array({u, v, len}));
  return out;
}

int key_to_index(const std::string& key) {
  int idx = -1;
  auto [p, ec] = std::from_chars(key.data(), key.data() + key.size(), idx);
  if (ec != std::errc() || p != key.data() + key.size() || idx < 0)
    bad("object key '" + key + "' is not a point id");
  return idx;
}

std::string trimmed(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& tok, const char* what) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size())
    bad(std::string("cannot parse ") + what + " from '" + tok + "'");
  return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(trimmed(line.substr(start)));
      return out;
    }
    out.push_back(trimmed(line.substr(start, pos - start)));
    start = pos + 1;
  }
}

}  // namespace

nlohmann::json metric_to_json(const FiniteMetric& m) {
  const int n = m.size();
  json rows = json::array();
  for (int i = 0; i < n; ++i) {
    json row = json::array();
    for (int j = 0; j < n; ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return json{{"n", n}, {"d", std::move(rows)}};
}

FiniteMetric metric_from_json(const nlohmann::json& j) {
  const int n = as_int(field(j, "n"), "'n'");
  const json& rows = field(j, "d");
  if (n < 0) bad("'n' must be nonnegative");
  if (!rows.is_array() || static_cast<int>(rows.size()) != n)
    bad("'d' must be an array of " + std::to_string(n) + " rows");
  std::vector<std::vector<double>> entries(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) {
    const json& row = rows[i];
    if (!row.is_array() || static_cast<int>(row.size()) != n)
      bad("row " + std::to_string(i) + " must hold " + std::to_string(n) + " numbers");
    for (int k = 0; k < n; ++k) entries[i][k] = as_double(row[k], "distance");
  }
  // keeps any asymmetry so validate_metric can call it out
  return FiniteMetric::from_rows(entries);
}

nlohmann::json matching_to_json(const MatchingResult& r) {
  json pairs = json::array();
  for (const auto& [a, b] : r.matching.pairs) pairs.push_back(json::array({a, b}));
  return json{{"pairs", std::move(pairs)}, {"value", r.value}};
}

MatchingResult matching_from_json(const nlohmann::json& j) {
  MatchingResult r;
  const json& pairs = field(j, "pairs");
  if (!pairs.is_array()) bad("'pairs' must be an array");
  for (const auto& e : pairs) {
    if (!e.is_array() || e.size() != 2) bad("each pair must be [i, j]");
    r.matching.pairs.emplace_back(as_int(e[0], "pair entry"), as_int(e[1], "pair entry"));
  }
  r.value = as_double(field(j, "value"), "'value'");
  return r;
}

nlohmann::json partition_to_json(const Partition2& p) {
  return json{{"plus", p.plus}, {"minus", p.minus}};
}

Partition2 partition_from_json(const nlohmann::json& j) {
  Partition2 p;
  p.plus = as_int_list(field(j, "plus"), "'plus'");
  p.minus = as_int_list(field(j, "minus"), "'minus'");
  return p;
}

nlohmann::json tree_to_json(const MetricTree& t) {
  json embed = json::object();
  for (std::size_t i = 0; i < t.embed.size(); ++i)
    embed[std::to_string(i)] = t.embed[i];
  return json{{"vertices", t.vertices},
              {"edges", edges_to_json(t.edges)},
              {"embed", std::move(embed)}};
}

MetricTree tree_from_json(const nlohmann::json& j) {
  MetricTree t;
  t.vertices = as_int_list(field(j, "vertices"), "'vertices'");
  t.edges = as_edges(field(j, "edges"));
  const json& embed = field(j, "embed");
  if (!embed.is_object()) bad("'embed' must be an object");
  t.embed.assign(embed.size(), -1);
  for (const auto& [key, value] : embed.items()) {
    const int idx = key_to_index(key);
    if (idx >= static_cast<int>(t.embed.size()))
      bad("embed keys must cover 0.." + std::to_string(t.embed.size() - 1));
    t.embed[idx] = as_int(value, "embed vertex");
  }
  for (std::size_t i = 0; i < t.embed.size(); ++i)
    if (t.embed[i] < 0) bad("embed is missing point " + std::to_string(i));
  return t;
}

nlohmann::json graph_to_json(const MetricGraph& g, const Partition2* pi) {
  json out{{"vertices", g.vertices},
           {"edges", edges_to_json(g.edges)},
           {"terminals", g.terminals}};
  if (pi != nullptr) out["partition"] = partition_to_json(*pi);
  return out;
}

GraphFile graph_from_json(const nlohmann::json& j) {
  GraphFile f;
  f.graph.vertices = as_int_list(field(j, "vertices"), "'vertices'");
  f.graph.edges = as_edges(field(j, "edges"));
  f.graph.terminals = as_int_list(field(j, "terminals"), "'terminals'");
  if (j.is_object() && j.contains("partition")) {
    f.has_partition = true;
    f.partition = partition_from_json(j.at("partition"));
  }
  return f;
}

nlohmann::json plfunction_to_json(const PLFunction& f) {
  json values = json::object();
  for (std::size_t v = 0; v < f.values.size(); ++v)
    values[std::to_string(v)] = f.values[v];
  return json{{"values", std::move(values)}};
}

PLFunction plfunction_from_json(const nlohmann::json& j, int vertex_count) {
  const json& values = field(j, "values");
  if (!values.is_object()) bad("'values' must be an object");
  PLFunction f;
  f.values.assign(static_cast<std::size_t>(vertex_count), 0.0);
  std::vector<bool> got(static_cast<std::size_t>(vertex_count), false);
  for (const auto& [key, value] : values.items()) {
    const int idx = key_to_index(key);
    if (idx >= vertex_count) bad("function value for unknown vertex " + key);
    f.values[idx] = as_double(value, "function value");
    got[idx] = true;
  }
  for (int v = 0; v < vertex_count; ++v)
    if (!got[v]) bad("function is missing vertex " + std::to_string(v));
  return f;
}

nlohmann::json dual_to_json(const DualResult& r) {
  return json{{"D", metric_to_json(r.D)["d"]},
              {"w", r.w},
              {"m", r.m},
              {"cuts", r.cuts},
              {"tree_like", r.tree_like}};
}

nlohmann::json certificate_to_json(const DualCertificate& c) {
  return json{{"H1", c.report.h1},
              {"m", c.report.m},
              {"defect", c.report.defect},
              {"value", c.value},
              {"checks",
               json{{"pair_isometry", c.report.pair_isometry},
                    {"path_overlap_le_point", c.report.path_overlap_le_point},
                    {"coverage", c.report.coverage},
                    {"parity_odd", c.report.parity_odd},
                    {"all_ok", c.report.all_ok()}}},
              {"D", metric_to_json(c.dual)["d"]},
              {"tree", tree_to_json(c.tree)},
              {"matching", matching_to_json({c.matching, c.value})}};
}

std::string series_to_csv(const ScalingSeries& s) {
  std::string out = "k,value,mode,trial,seed\n";
  for (const auto& row : s.rows) {
    out += format_double(row.x);
    out += ',';
    out += format_double(row.value);
    out += ',';
    out += row.mode;
    out += ',';
    out += std::to_string(row.trial);
    out += ',';
    out += std::to_string(row.seed);
    out += '\n';
  }
  return out;
}

ScalingSeries series_from_csv(const std::string& text) {
  ScalingSeries s;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    line = trimmed(line);
    if (line.empty()) continue;
    if (first && line.rfind("k,", 0) == 0) {
      first = false;
      continue;
    }
    first = false;
    const std::vector<std::string> tok = split(line, ',');
    if (tok.size() != 5) bad("series row needs 5 fields, got '" + line + "'");
    ScalingRow row;
    row.x = parse_double(tok[0], "k");
    row.value = parse_double(tok[1], "value");
    row.mode = tok[2];
    int trial = 0;
    auto [p, ec] = std::from_chars(tok[3].data(), tok[3].data() + tok[3].size(), trial);
    if (ec != std::errc() || p != tok[3].data() + tok[3].size())
      bad("cannot parse trial from '" + tok[3] + "'");
    row.trial = trial;
    std::uint64_t seed = 0;
    auto [ps, es] = std::from_chars(tok[4].data(), tok[4].data() + tok[4].size(), seed);
    if (es != std::errc() || ps != tok[4].data() + tok[4].size())
      bad("cannot parse seed from '" + tok[4] + "'");
    row.seed = seed;
    s.rows.push_back(std::move(row));
  }
  return s;
}

std::vector<std::vector<double>> points_from_csv(const std::string& text) {
  std::vector<std::vector<double>> pts;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    line = trimmed(line);
    if (line.empty()) continue;
    std::vector<double> row;
    for (const std::string& tok : split(line, ','))
      row.push_back(parse_double(tok, "coordinate"));
    if (!pts.empty() && row.size() != pts.front().size())
      bad("point rows have mixed widths");
    pts.push_back(std::move(row));
  }
  if (pts.empty()) bad("no points in file");
  return pts;
}

std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) fail("InternalError", "double formatting failed");
  return std::string(buf, p);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) bad("cannot read file: " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

nlohmann::json read_json_file(const std::string& path) {
  const std::string text = read_text_file(path);
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) bad("file is not valid JSON: " + path);
  return j;
}

}  // namespace treematch
