#pragma once

#include <tuple>
#include <vector>

#include "treematch/matching.hpp"
#include "treematch/metric.hpp"
#include "treematch/tree.hpp"

namespace treematch {

// Connected graph with positive edge lengths; terminals are the marked point
// set X living on the vertices.
struct MetricGraph {
  std::vector<int> vertices;
  std::vector<std::tuple<int, int, double>> edges;
  std::vector<int> terminals;
};

// Vertex values, affine on every edge.
struct PLFunction {
  std::vector<double> values;
};

// Mod-2 chain supported on whole edges.
struct Chain2 {
  std::vector<int> edges;
  double mass = 0.0;
};

struct FillResult {
  Chain2 chain;
  double mass = 0.0;
  double matching_value = 0.0;
  Matching matching;  // pairs index into terminals
};

// Point of a metric tree: a vertex (edge == -1) or an interior edge point at
// `offset` from the edge's first endpoint.
struct TreePoint {
  int edge = -1;
  double offset = 0.0;
  int vertex = -1;
};

struct ComposedLevel {
  MetricGraph graph;
  PLFunction phi;
  // edge_images[e] lists the edges of `graph` that cover edge e of the input
  // (two entries when the edge was subdivided)
  std::vector<std::vector<int>> edge_images;
};

void validate_graph(const MetricGraph& g);
void validate_plfunction(const MetricGraph& g, const PLFunction& phi,
                         double tol = kTolGeom);
// plus/minus must partition the terminal set into equal halves
void validate_graph_partition(const MetricGraph& g, const Partition2& pi);

std::vector<std::vector<double>> graph_vertex_distances(const MetricGraph& g);

// Path distances restricted to the terminals.
FiniteMetric shortest_path_metric(const MetricGraph& g);

// Minimum-mass edge set whose odd-degree vertices are exactly the terminals.
FillResult fill_z2(const MetricGraph& g);

// Tree viewed as a graph; terminals are the vertices carrying an odd number
// of embedded points.
MetricGraph tree_as_graph(const MetricTree& t);

// rho(v) = d_T(root, v); slope is 1 on every edge.
PLFunction orientation_rho(const MetricTree& t, int root);

// 1-Lipschitz extension of the terminal assignment f0 (indexed like
// g.terminals) to every vertex, processed by distance from the terminal set.
std::vector<TreePoint> extend_to_tree(const MetricGraph& g, const MetricTree& t,
                                      const std::vector<TreePoint>& f0);

// Genuine composition rho(f(.)): each graph edge is subdivided where the
// image geodesic turns back toward the root, so the result is affine on
// every edge of the returned graph.
ComposedLevel compose_orientation(const MetricGraph& g, const MetricTree& t,
                                  const std::vector<TreePoint>& f, int root);

// Number of level-set points of phi at height t whose removal leaves a
// component with an odd number of terminals.
int cut_z2(const MetricGraph& g, const PLFunction& phi, double t);

// Integral of cut_z2 over t, exact via the vertex-value sweep.
double lev_z2(const MetricGraph& g, const PLFunction& phi);

// |#({phi <= t} terminals in plus) - #(... in minus)|.
int cut_z(const MetricGraph& g, const PLFunction& phi, double t, const Partition2& pi);

// Integral of cut_z over t, exact via the terminal-value sweep.
double lev_z(const MetricGraph& g, const PLFunction& phi, const Partition2& pi);

// Sum over chain edges of |phi(u) - phi(v)|.
double chain_action(const MetricGraph& g, const Chain2& c, const PLFunction& phi);

// Kantorovich potential on the terminals extended to every vertex by the
// largest 1-Lipschitz extension from the minus class.
PLFunction kantorovich_extend(const MetricGraph& g, const Partition2& pi);

}  // namespace treematch
