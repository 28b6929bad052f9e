#pragma once

#include <tuple>
#include <vector>

#include "treematch/matching.hpp"
#include "treematch/metric.hpp"

namespace treematch {

// Finite metric tree. Vertices are 0..V-1, edges carry positive lengths,
// embed sends each input point to its vertex (zero-distance points share
// a vertex).
struct MetricTree {
  std::vector<int> vertices;
  std::vector<std::tuple<int, int, double>> edges;
  std::vector<int> embed;
};

// Structural checks: defined vertices, positive lengths, connected, acyclic,
// embeddings in range. Throws InvalidInput.
void validate_tree(const MetricTree& t);

// Builds a tree whose path metric reproduces the tree-like pseudometric D
// within tol on embedded points. Throws NotTreeLike when the four point
// condition fails, NumericalDegeneracy when attachment arithmetic breaks.
MetricTree realize_tree(const FiniteMetric& D, double tol = kTolGeom);

double tree_total_length(const MetricTree& t);

std::vector<std::vector<double>> tree_all_vertex_distances(const MetricTree& t);

// Path metric pulled back to the embedded points.
FiniteMetric tree_metric_on_embedded(const MetricTree& t);

// Tree paths of matched pairs as sets of edge indices (empty for pairs
// sharing a vertex).
struct PathSet {
  std::vector<std::vector<int>> arcs;
};

PathSet matching_paths(const MetricTree& t, const Matching& pi);

struct CertificateReport {
  bool pair_isometry = false;          // d_T(f x, f y) = d(x, y) on matched pairs
  bool path_overlap_le_point = false;  // arcs pairwise share length <= tol
  bool coverage = false;               // arcs cover the whole tree
  bool parity_odd = false;             // each covered edge splits points odd/odd
  double h1 = 0.0;                     // total tree length
  double m = 0.0;                      // matching number of the base metric
  double defect = 0.0;                 // |h1 - m|
  bool all_ok() const {
    return pair_isometry && path_overlap_le_point && coverage && parity_odd;
  }
};

struct DualCertificate {
  FiniteMetric base;
  FiniteMetric dual;
  MetricTree tree;
  Matching matching;
  double value = 0.0;
  CertificateReport report;
};

CertificateReport verify_certificate(const DualCertificate& c, double tol = kTolGeom);

// minimize_dual -> realize_tree -> min_matching -> verify_certificate.
DualCertificate build_certificate(const FiniteMetric& m, double tol = kTolGeom);

}  // namespace treematch
