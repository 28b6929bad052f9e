#pragma once

#include <json.hpp>

#include <string>
#include <vector>

#include "treematch/calibration.hpp"
#include "treematch/dimension.hpp"
#include "treematch/dual.hpp"
#include "treematch/matching.hpp"
#include "treematch/metric.hpp"
#include "treematch/tree.hpp"

namespace treematch {

// Codecs between the library types and their JSON/CSV file shapes. Numbers
// are written shortest-round-trip, so re-parsing restores them bit for bit.
// All parsers throw Error("InvalidInput", ...) on malformed documents.

nlohmann::json metric_to_json(const FiniteMetric& m);  // {"n": n, "d": [[..]]}
FiniteMetric metric_from_json(const nlohmann::json& j);

nlohmann::json matching_to_json(const MatchingResult& r);  // {"pairs", "value"}
MatchingResult matching_from_json(const nlohmann::json& j);

nlohmann::json partition_to_json(const Partition2& p);  // {"plus", "minus"}
Partition2 partition_from_json(const nlohmann::json& j);

// {"vertices", "edges": [[u,v,len]..], "embed": {"point": vertex, ..}}
nlohmann::json tree_to_json(const MetricTree& t);
MetricTree tree_from_json(const nlohmann::json& j);

struct GraphFile {
  MetricGraph graph;
  bool has_partition = false;
  Partition2 partition;  // over terminal ids, when present
};

// {"vertices", "edges", "terminals", "partition"?}
nlohmann::json graph_to_json(const MetricGraph& g, const Partition2* pi = nullptr);
GraphFile graph_from_json(const nlohmann::json& j);

nlohmann::json plfunction_to_json(const PLFunction& f);  // {"values": {"id": v}}
PLFunction plfunction_from_json(const nlohmann::json& j, int vertex_count);

nlohmann::json dual_to_json(const DualResult& r);  // {"D","w","m","cuts","tree_like"}

// {"H1","m","defect","value","checks",{...},"D","tree","matching"}
nlohmann::json certificate_to_json(const DualCertificate& c);

std::string series_to_csv(const ScalingSeries& s);  // k,value,mode,trial,seed
ScalingSeries series_from_csv(const std::string& text);

// One point per line, comma separated coordinates, blank lines skipped.
std::vector<std::vector<double>> points_from_csv(const std::string& text);

// Shortest text that parses back to exactly v; '.' decimal point always.
std::string format_double(double v);

std::string read_text_file(const std::string& path);
nlohmann::json read_json_file(const std::string& path);

}  // namespace treematch
