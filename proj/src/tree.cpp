#include "treematch/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "treematch/dual.hpp"
#include "treematch/error.hpp"

namespace treematch {
namespace {

using Adjacency = std::vector<std::vector<std::pair<int, int>>>;  // (to, edge)

Adjacency build_adjacency(const MetricTree& t) {
  Adjacency adj(t.vertices.size());
  for (int e = 0; e < static_cast<int>(t.edges.size()); ++e) {
    auto [u, v, len] = t.edges[e];
    adj[u].push_back({v, e});
    adj[v].push_back({u, e});
  }
  return adj;
}

std::vector<double> distances_from(const Adjacency& adj,
                                   const std::vector<std::tuple<int, int, double>>& edges,
                                   int src) {
  std::vector<double> dist(adj.size(), -1.0);
  std::vector<int> stack = {src};
  dist[src] = 0.0;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    for (auto [v, e] : adj[u]) {
      if (dist[v] >= 0.0) continue;
      dist[v] = dist[u] + std::get<2>(edges[e]);
      stack.push_back(v);
    }
  }
  return dist;
}

// Edge ids on the unique path from u to v, in walk order.
std::vector<int> path_edges(const Adjacency& adj, int u, int v) {
  std::vector<int> parent_edge(adj.size(), -1);
  std::vector<int> parent(adj.size(), -1);
  std::vector<int> stack = {u};
  parent[u] = u;
  while (!stack.empty()) {
    int a = stack.back();
    stack.pop_back();
    if (a == v) break;
    for (auto [b, e] : adj[a]) {
      if (parent[b] >= 0) continue;
      parent[b] = a;
      parent_edge[b] = e;
      stack.push_back(b);
    }
  }
  if (parent[v] < 0) fail("InternalError", "path endpoints are disconnected");
  std::vector<int> path;
  for (int a = v; a != u; a = parent[a]) path.push_back(parent_edge[a]);
  std::reverse(path.begin(), path.end());
  return path;
}

// Union-find over near-zero distances.
struct ZeroClasses {
  std::vector<int> root;
  explicit ZeroClasses(int n) : root(n) { std::iota(root.begin(), root.end(), 0); }
  int find(int a) {
    while (root[a] != a) a = root[a] = root[root[a]];
    return a;
  }
  void unite(int a, int b) { root[find(a)] = find(b); }
};

struct Builder {
  const FiniteMetric& D;
  double snap = 0.0;
  MetricTree tree;
  Adjacency adj;

  int add_vertex() {
    int id = static_cast<int>(tree.vertices.size());
    tree.vertices.push_back(id);
    adj.push_back({});
    return id;
  }

  void add_edge(int u, int v, double len) {
    int e = static_cast<int>(tree.edges.size());
    tree.edges.push_back({u, v, len});
    adj[u].push_back({v, e});
    adj[v].push_back({u, e});
  }

  void rebuild_adjacency() {
    adj.assign(tree.vertices.size(), {});
    for (int e = 0; e < static_cast<int>(tree.edges.size()); ++e) {
      auto [u, v, len] = tree.edges[e];
      adj[u].push_back({v, e});
      adj[v].push_back({u, e});
    }
  }

  // Vertex at distance alpha from va along the tree path to vb, splitting an
  // edge when the location is not near an existing vertex.
  int locate(int va, int vb, double alpha) {
    if (alpha <= snap) return va;
    std::vector<int> path = path_edges(adj, va, vb);
    int at = va;
    double walked = 0.0;
    for (int e : path) {
      auto [u, v, len] = tree.edges[e];
      int next = (u == at) ? v : u;
      if (alpha <= walked + len + snap) {
        double beta = alpha - walked;
        if (beta <= snap) return at;
        if (beta >= len - snap) return next;
        int s = add_vertex();
        tree.edges[e] = {at, s, beta};
        add_edge(s, next, len - beta);
        rebuild_adjacency();
        return s;
      }
      walked += len;
      at = next;
    }
    return at;
  }
};

}  // namespace

void validate_tree(const MetricTree& t) {
  const int nv = static_cast<int>(t.vertices.size());
  if (nv <= 0) fail("InvalidInput", "tree has no vertices");
  for (int i = 0; i < nv; ++i) {
    if (t.vertices[i] != i) fail("InvalidInput", "tree vertices must be 0..V-1");
  }
  for (const auto& [u, v, len] : t.edges) {
    if (u < 0 || u >= nv || v < 0 || v >= nv)
      fail("InvalidInput", "edge endpoint out of range");
    if (u == v) fail("InvalidInput", "edge endpoints coincide");
    if (!std::isfinite(len) || len <= 0.0)
      fail("InvalidInput", "edge length must be positive");
  }
  if (static_cast<int>(t.edges.size()) != nv - 1)
    fail("InvalidInput", "tree must have exactly V-1 edges");
  Adjacency adj = build_adjacency(t);
  std::vector<double> dist = distances_from(adj, t.edges, 0);
  for (int i = 0; i < nv; ++i) {
    if (dist[i] < 0.0) fail("InvalidInput", "tree is disconnected");
  }
  for (int vid : t.embed) {
    if (vid < 0 || vid >= nv) fail("InvalidInput", "embedded vertex out of range");
  }
}

MetricTree realize_tree(const FiniteMetric& D_in, double tol) {
  FiniteMetric D = validate_metric(D_in, tol);
  const int n = D.size();
  FourPointReport fp = is_tree_like(D, tol);
  if (!fp.tree_like) {
    fail("NotTreeLike",
         "four point condition fails on (" + std::to_string(fp.worst[0]) + ", " +
             std::to_string(fp.worst[1]) + ", " + std::to_string(fp.worst[2]) + ", " +
             std::to_string(fp.worst[3]) + ") by " + std::to_string(fp.violation));
  }

  double scale = 1.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) scale = std::max(scale, D(i, j));
  const double merge = 1e-7 * scale;

  ZeroClasses classes(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (D(i, j) <= merge) classes.unite(i, j);

  std::vector<int> reps;
  std::vector<int> rep_of(n, -1);
  for (int i = 0; i < n; ++i) {
    int r = classes.find(i);
    if (rep_of[r] < 0) {
      rep_of[r] = static_cast<int>(reps.size());
      reps.push_back(i);
    }
  }
  const int k = static_cast<int>(reps.size());

  Builder b{D, 1e-7 * scale, {}, {}};
  std::vector<int> vertex_of(k, -1);

  if (k == 1) {
    int v0 = b.add_vertex();
    vertex_of[0] = v0;
  } else {
    std::vector<int> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> sums(k, 0.0);
    for (int a = 0; a < k; ++a)
      for (int c = 0; c < k; ++c) sums[a] += D(reps[a], reps[c]);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int c) { return sums[a] > sums[c]; });

    int r0 = order[0];
    int r1 = order[1];
    vertex_of[r0] = b.add_vertex();
    vertex_of[r1] = b.add_vertex();
    b.add_edge(vertex_of[r0], vertex_of[r1], D(reps[r0], reps[r1]));

    std::vector<int> placed = {r0, r1};
    for (int step = 2; step < k; ++step) {
      int x = order[step];
      double best_mu = 0.0;
      int best_a = -1;
      int best_c = -1;
      for (int ia = 0; ia < static_cast<int>(placed.size()); ++ia) {
        for (int ic = ia + 1; ic < static_cast<int>(placed.size()); ++ic) {
          int a = placed[ia];
          int c = placed[ic];
          double mu = 0.5 * (D(reps[x], reps[a]) + D(reps[x], reps[c]) -
                             D(reps[a], reps[c]));
          if (best_a < 0 || mu < best_mu) {
            best_mu = mu;
            best_a = a;
            best_c = c;
          }
        }
      }
      if (best_mu < -tol) {
        fail("NumericalDegeneracy",
             "attachment length " + std::to_string(best_mu) + " below zero");
      }
      best_mu = std::max(best_mu, 0.0);
      double dac = D(reps[best_a], reps[best_c]);
      double alpha =
          0.5 * (D(reps[x], reps[best_a]) + dac - D(reps[x], reps[best_c]));
      if (alpha < -tol || alpha > dac + tol) {
        fail("NumericalDegeneracy",
             "attachment offset " + std::to_string(alpha) + " outside [0, " +
                 std::to_string(dac) + "]");
      }
      alpha = std::clamp(alpha, 0.0, dac);
      int p = b.locate(vertex_of[best_a], vertex_of[best_c], alpha);
      if (best_mu <= b.snap) {
        vertex_of[x] = p;
      } else {
        int vx = b.add_vertex();
        b.add_edge(p, vx, best_mu);
        vertex_of[x] = vx;
      }
      placed.push_back(x);
    }
  }

  b.tree.embed.resize(n);
  for (int i = 0; i < n; ++i) {
    b.tree.embed[i] = vertex_of[rep_of[classes.find(i)]];
    if (b.tree.embed[i] < 0) fail("InternalError", "point left unembedded");
  }
  validate_tree(b.tree);
  return b.tree;
}

double tree_total_length(const MetricTree& t) {
  double total = 0.0;
  for (const auto& [u, v, len] : t.edges) total += len;
  return total;
}

std::vector<std::vector<double>> tree_all_vertex_distances(const MetricTree& t) {
  Adjacency adj = build_adjacency(t);
  std::vector<std::vector<double>> dist;
  dist.reserve(t.vertices.size());
  for (int v = 0; v < static_cast<int>(t.vertices.size()); ++v) {
    dist.push_back(distances_from(adj, t.edges, v));
  }
  return dist;
}

FiniteMetric tree_metric_on_embedded(const MetricTree& t) {
  validate_tree(t);
  auto dist = tree_all_vertex_distances(t);
  const int n = static_cast<int>(t.embed.size());
  FiniteMetric m(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) m.set(i, j, dist[t.embed[i]][t.embed[j]]);
  return m;
}

PathSet matching_paths(const MetricTree& t, const Matching& pi) {
  validate_tree(t);
  validate_matching(pi, static_cast<int>(t.embed.size()));
  Adjacency adj = build_adjacency(t);
  PathSet out;
  out.arcs.reserve(pi.pairs.size());
  for (auto [i, j] : pi.pairs) {
    int u = t.embed[i];
    int v = t.embed[j];
    if (u == v) {
      out.arcs.push_back({});
      continue;
    }
    out.arcs.push_back(path_edges(adj, u, v));
  }
  return out;
}

CertificateReport verify_certificate(const DualCertificate& c, double tol) {
  validate_tree(c.tree);
  const int n = c.base.size();
  if (static_cast<int>(c.tree.embed.size()) != n)
    fail("DimensionMismatch",
         "tree embeds " + std::to_string(c.tree.embed.size()) + " points, base has " +
             std::to_string(n));
  validate_matching(c.matching, n);

  CertificateReport rep;
  rep.h1 = tree_total_length(c.tree);
  rep.m = min_matching(c.base).value;
  rep.defect = std::abs(rep.h1 - rep.m);

  auto dist = tree_all_vertex_distances(c.tree);
  rep.pair_isometry = true;
  for (auto [i, j] : c.matching.pairs) {
    double dt = dist[c.tree.embed[i]][c.tree.embed[j]];
    if (std::abs(dt - c.base(i, j)) > tol) rep.pair_isometry = false;
  }

  PathSet paths = matching_paths(c.tree, c.matching);
  std::vector<std::set<int>> arcs;
  arcs.reserve(paths.arcs.size());
  for (const auto& a : paths.arcs) arcs.emplace_back(a.begin(), a.end());

  rep.path_overlap_le_point = true;
  for (size_t a = 0; a < arcs.size(); ++a) {
    for (size_t b = a + 1; b < arcs.size(); ++b) {
      double shared = 0.0;
      for (int e : arcs[a])
        if (arcs[b].count(e)) shared += std::get<2>(c.tree.edges[e]);
      if (shared > tol) rep.path_overlap_le_point = false;
    }
  }

  std::set<int> covered;
  for (const auto& a : arcs) covered.insert(a.begin(), a.end());
  double covered_len = 0.0;
  for (int e : covered) covered_len += std::get<2>(c.tree.edges[e]);
  rep.coverage = std::abs(covered_len - rep.h1) <= tol;

  rep.parity_odd = true;
  Adjacency adj = build_adjacency(c.tree);
  for (int e : covered) {
    if (std::get<2>(c.tree.edges[e]) <= tol) continue;
    // count embedded points on the u side of the split
    auto [eu, ev, elen] = c.tree.edges[e];
    std::vector<char> seen(c.tree.vertices.size(), 0);
    std::vector<int> stack = {eu};
    seen[eu] = 1;
    while (!stack.empty()) {
      int a = stack.back();
      stack.pop_back();
      for (auto [bvert, eid] : adj[a]) {
        if (eid == e || seen[bvert]) continue;
        seen[bvert] = 1;
        stack.push_back(bvert);
      }
    }
    int side = 0;
    for (int i = 0; i < n; ++i)
      if (seen[c.tree.embed[i]]) ++side;
    if (side % 2 == 0 || (n - side) % 2 == 0) rep.parity_odd = false;
  }
  return rep;
}

DualCertificate build_certificate(const FiniteMetric& m, double tol) {
  DualCertificate cert;
  cert.base = validate_metric(m, kTolGeom);
  DualResult dual = minimize_dual(cert.base);
  cert.dual = dual.D;
  cert.tree = realize_tree(cert.dual, tol);
  MatchingResult base_match = min_matching(cert.base);
  cert.matching = base_match.matching;
  cert.value = base_match.value;
  cert.report = verify_certificate(cert, tol);
  return cert;
}

}  // namespace treematch
