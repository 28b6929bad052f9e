#include "treematch/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include "treematch/error.hpp"

namespace treematch {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct GraphAdj {
  std::vector<std::vector<std::pair<int, int>>> at;  // (to, edge)
  explicit GraphAdj(const MetricGraph& g) : at(g.vertices.size()) {
    for (int e = 0; e < static_cast<int>(g.edges.size()); ++e) {
      auto [u, v, len] = g.edges[e];
      at[u].push_back({v, e});
      at[v].push_back({u, e});
    }
  }
};

struct Dijkstra {
  std::vector<double> dist;
  std::vector<int> parent_vertex;
  std::vector<int> parent_edge;
};

Dijkstra dijkstra(const MetricGraph& g, const GraphAdj& adj,
                  const std::vector<int>& sources) {
  Dijkstra out;
  out.dist.assign(g.vertices.size(), kInf);
  out.parent_vertex.assign(g.vertices.size(), -1);
  out.parent_edge.assign(g.vertices.size(), -1);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  for (int s : sources) {
    out.dist[s] = 0.0;
    heap.push({0.0, s});
  }
  while (!heap.empty()) {
    auto [d, u] = heap.top();
    heap.pop();
    if (d > out.dist[u]) continue;
    for (auto [v, e] : adj.at[u]) {
      double nd = d + std::get<2>(g.edges[e]);
      if (nd < out.dist[v]) {
        out.dist[v] = nd;
        out.parent_vertex[v] = u;
        out.parent_edge[v] = e;
        heap.push({nd, v});
      }
    }
  }
  return out;
}

double max_abs_value(const PLFunction& phi) {
  double m = 0.0;
  for (double v : phi.values) m = std::max(m, std::abs(v));
  return m;
}

// True when removing edge e disconnects the graph into parts that both hold
// an odd number of terminals.
std::vector<char> odd_bridge_flags(const MetricGraph& g, const GraphAdj& adj) {
  const int nv = static_cast<int>(g.vertices.size());
  std::vector<char> is_terminal(nv, 0);
  for (int x : g.terminals) is_terminal[x] = 1;
  std::vector<char> flags(g.edges.size(), 0);
  for (int e = 0; e < static_cast<int>(g.edges.size()); ++e) {
    auto [eu, ev, elen] = g.edges[e];
    std::vector<char> seen(nv, 0);
    std::vector<int> stack = {eu};
    seen[eu] = 1;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (auto [v, id] : adj.at[u]) {
        if (id == e || seen[v]) continue;
        seen[v] = 1;
        stack.push_back(v);
      }
    }
    if (seen[ev]) continue;  // cycle edge, removal keeps the graph connected
    int side = 0;
    for (int x : g.terminals)
      if (seen[x]) ++side;
    flags[e] = (side % 2 == 1);
  }
  return flags;
}

void require_even_terminals(const MetricGraph& g) {
  if (g.terminals.size() % 2 != 0) {
    fail("OddTerminals",
         "mod-2 operations need an even terminal count, got " +
             std::to_string(g.terminals.size()));
  }
}

// ---- tree point helpers ----

struct TreeGeometry {
  const MetricTree& t;
  std::vector<std::vector<double>> dist;
  explicit TreeGeometry(const MetricTree& tree)
      : t(tree), dist(tree_all_vertex_distances(tree)) {}

  double to_vertex(const TreePoint& p, int v) const {
    if (p.edge < 0) return dist[p.vertex][v];
    auto [a, b, len] = t.edges[p.edge];
    return std::min(p.offset + dist[a][v], (len - p.offset) + dist[b][v]);
  }

  double between(const TreePoint& p, const TreePoint& q) const {
    if (p.edge < 0) return to_vertex(q, p.vertex);
    if (q.edge < 0) return to_vertex(p, q.vertex);
    if (p.edge == q.edge) return std::abs(p.offset - q.offset);
    auto [a, b, len] = t.edges[p.edge];
    return std::min(p.offset + to_vertex(q, a), (len - p.offset) + to_vertex(q, b));
  }
};

TreePoint canonical_point(const MetricTree& t, int edge, double offset, double snap) {
  auto [a, b, len] = t.edges[edge];
  if (offset <= snap) return TreePoint{-1, 0.0, a};
  if (offset >= len - snap) return TreePoint{-1, 0.0, b};
  return TreePoint{edge, offset, -1};
}

void check_tree_point(const MetricTree& t, const TreePoint& p) {
  if (p.edge < 0) {
    if (p.vertex < 0 || p.vertex >= static_cast<int>(t.vertices.size()))
      fail("InvalidInput", "tree point vertex out of range");
    return;
  }
  if (p.edge >= static_cast<int>(t.edges.size()))
    fail("InvalidInput", "tree point edge out of range");
  double len = std::get<2>(t.edges[p.edge]);
  if (!(p.offset >= -1e-12) || !(p.offset <= len + 1e-12))
    fail("InvalidInput", "tree point offset outside its edge");
}

}  // namespace

void validate_graph(const MetricGraph& g) {
  const int nv = static_cast<int>(g.vertices.size());
  if (nv <= 0) fail("InvalidInput", "graph has no vertices");
  for (int i = 0; i < nv; ++i)
    if (g.vertices[i] != i) fail("InvalidInput", "graph vertices must be 0..V-1");
  for (const auto& [u, v, len] : g.edges) {
    if (u < 0 || u >= nv || v < 0 || v >= nv)
      fail("InvalidInput", "edge endpoint out of range");
    if (u == v) fail("InvalidInput", "self loops are not allowed");
    if (!std::isfinite(len) || len <= 0.0)
      fail("InvalidInput", "edge length must be positive");
  }
  std::set<int> seen_terminals;
  for (int x : g.terminals) {
    if (x < 0 || x >= nv) fail("InvalidInput", "terminal out of range");
    if (!seen_terminals.insert(x).second)
      fail("InvalidInput", "terminal " + std::to_string(x) + " repeats");
  }
  GraphAdj adj(g);
  std::vector<char> seen(nv, 0);
  std::vector<int> stack = {0};
  seen[0] = 1;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    for (auto [v, e] : adj.at[u]) {
      if (seen[v]) continue;
      seen[v] = 1;
      stack.push_back(v);
    }
  }
  for (int i = 0; i < nv; ++i)
    if (!seen[i]) fail("Disconnected", "vertex " + std::to_string(i) + " is unreachable");
}

void validate_plfunction(const MetricGraph& g, const PLFunction& phi, double tol) {
  if (phi.values.size() != g.vertices.size())
    fail("DimensionMismatch", "function has " + std::to_string(phi.values.size()) +
                                  " values for " + std::to_string(g.vertices.size()) +
                                  " vertices");
  for (double v : phi.values)
    if (!std::isfinite(v)) fail("InvalidInput", "function value is not finite");
  double scale = 1.0;
  for (const auto& [u, v, len] : g.edges) scale = std::max(scale, len);
  for (const auto& [u, v, len] : g.edges) {
    if (std::abs(phi.values[u] - phi.values[v]) > len + tol * scale)
      fail("InvalidInput", "function is not 1-Lipschitz on edge (" +
                               std::to_string(u) + "," + std::to_string(v) + ")");
  }
}

void validate_graph_partition(const MetricGraph& g, const Partition2& pi) {
  std::set<int> plus(pi.plus.begin(), pi.plus.end());
  std::set<int> minus(pi.minus.begin(), pi.minus.end());
  if (plus.size() != pi.plus.size() || minus.size() != pi.minus.size())
    fail("InvalidPartition", "partition repeats a vertex");
  if (pi.plus.size() != pi.minus.size())
    fail("InvalidPartition", "classes have sizes " + std::to_string(pi.plus.size()) +
                                 " and " + std::to_string(pi.minus.size()));
  std::set<int> terminals(g.terminals.begin(), g.terminals.end());
  std::set<int> both;
  for (int x : plus) {
    if (minus.count(x)) fail("InvalidPartition", "vertex " + std::to_string(x) + " is in both classes");
    both.insert(x);
  }
  for (int x : minus) both.insert(x);
  if (both != terminals)
    fail("InvalidPartition", "partition does not cover the terminal set exactly");
}

std::vector<std::vector<double>> graph_vertex_distances(const MetricGraph& g) {
  GraphAdj adj(g);
  std::vector<std::vector<double>> out;
  out.reserve(g.vertices.size());
  for (int v = 0; v < static_cast<int>(g.vertices.size()); ++v)
    out.push_back(dijkstra(g, adj, {v}).dist);
  return out;
}

FiniteMetric shortest_path_metric(const MetricGraph& g) {
  validate_graph(g);
  if (g.terminals.empty()) fail("InvalidInput", "graph has no terminals");
  GraphAdj adj(g);
  const int k = static_cast<int>(g.terminals.size());
  FiniteMetric m(k);
  for (int i = 0; i < k; ++i) {
    Dijkstra d = dijkstra(g, adj, {g.terminals[i]});
    for (int j = i + 1; j < k; ++j) m.set(i, j, d.dist[g.terminals[j]]);
  }
  return validate_metric(m);
}

FillResult fill_z2(const MetricGraph& g) {
  validate_graph(g);
  require_even_terminals(g);
  FillResult out;
  if (g.terminals.empty()) return out;

  FiniteMetric m = shortest_path_metric(g);
  MatchingResult mm = min_matching(m);
  out.matching = mm.matching;
  out.matching_value = mm.value;

  GraphAdj adj(g);
  std::vector<char> parity(g.edges.size(), 0);
  for (auto [i, j] : mm.matching.pairs) {
    Dijkstra d = dijkstra(g, adj, {g.terminals[i]});
    for (int v = g.terminals[j]; d.parent_vertex[v] >= 0; v = d.parent_vertex[v])
      parity[d.parent_edge[v]] ^= 1;
  }
  for (int e = 0; e < static_cast<int>(g.edges.size()); ++e) {
    if (!parity[e]) continue;
    out.chain.edges.push_back(e);
    out.chain.mass += std::get<2>(g.edges[e]);
  }
  out.mass = out.chain.mass;

  // boundary audit: odd-degree vertices of the chain must equal the terminals
  std::vector<int> degree(g.vertices.size(), 0);
  for (int e : out.chain.edges) {
    ++degree[std::get<0>(g.edges[e])];
    ++degree[std::get<1>(g.edges[e])];
  }
  std::set<int> boundary;
  for (int v = 0; v < static_cast<int>(g.vertices.size()); ++v)
    if (degree[v] % 2 == 1) boundary.insert(v);
  std::set<int> terminals(g.terminals.begin(), g.terminals.end());
  if (boundary != terminals) fail("InternalError", "chain boundary is not the terminal set");
  return out;
}

MetricGraph tree_as_graph(const MetricTree& t) {
  validate_tree(t);
  MetricGraph g;
  g.vertices = t.vertices;
  g.edges = t.edges;
  std::vector<int> mult(t.vertices.size(), 0);
  for (int v : t.embed) ++mult[v];
  for (int v = 0; v < static_cast<int>(t.vertices.size()); ++v)
    if (mult[v] % 2 == 1) g.terminals.push_back(v);
  return g;
}

PLFunction orientation_rho(const MetricTree& t, int root) {
  validate_tree(t);
  if (root < 0 || root >= static_cast<int>(t.vertices.size()))
    fail("RootNotInTree", "root vertex " + std::to_string(root) + " is not in the tree");
  auto dist = tree_all_vertex_distances(t);
  PLFunction rho;
  rho.values = dist[root];
  return rho;
}

std::vector<TreePoint> extend_to_tree(const MetricGraph& g, const MetricTree& t,
                                      const std::vector<TreePoint>& f0) {
  validate_graph(g);
  validate_tree(t);
  if (g.terminals.empty()) fail("InvalidInput", "no terminals to extend from");
  if (f0.size() != g.terminals.size())
    fail("DimensionMismatch", "got " + std::to_string(f0.size()) + " images for " +
                                  std::to_string(g.terminals.size()) + " terminals");
  for (const auto& p : f0) check_tree_point(t, p);

  TreeGeometry geo(t);
  const int nv = static_cast<int>(g.vertices.size());
  auto gdist = graph_vertex_distances(g);

  double scale = 1.0;
  for (const auto& row : gdist)
    for (double d : row) scale = std::max(scale, d);
  for (const auto& row : geo.dist)
    for (double d : row) scale = std::max(scale, d);
  const double tau = 1e-9 * scale;
  const double snap = 1e-12 * scale;

  std::vector<TreePoint> f(nv);
  std::vector<char> assigned(nv, 0);
  std::vector<int> done;
  for (size_t k = 0; k < g.terminals.size(); ++k) {
    f[g.terminals[k]] = f0[k];
    assigned[g.terminals[k]] = 1;
    done.push_back(g.terminals[k]);
  }

  GraphAdj adj(g);
  Dijkstra from_terminals = dijkstra(g, adj, g.terminals);
  std::vector<int> order(nv);
  for (int v = 0; v < nv; ++v) order[v] = v;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return from_terminals.dist[a] < from_terminals.dist[b];
  });

  for (int v : order) {
    if (assigned[v]) continue;
    if (!std::isfinite(from_terminals.dist[v]))
      fail("InternalError", "vertex unreachable from the terminal set");

    if (t.edges.empty()) {
      for (int x : done) {
        if (geo.to_vertex(f[x], 0) > gdist[v][x] + tau)
          fail("InfeasibleExtension",
               "ball around vertex " + std::to_string(x) + " excludes the tree point");
      }
      f[v] = TreePoint{-1, 0.0, 0};
      assigned[v] = 1;
      done.push_back(v);
      continue;
    }

    // feasible region per tree edge, as interval lists
    std::vector<std::vector<std::pair<double, double>>> segs(t.edges.size());
    for (size_t e = 0; e < t.edges.size(); ++e)
      segs[e] = {{0.0, std::get<2>(t.edges[e])}};
    for (int x : done) {
      double r = gdist[v][x] + tau;
      for (size_t e = 0; e < t.edges.size(); ++e) {
        if (segs[e].empty()) continue;
        auto [a, b, len] = t.edges[e];
        double da = geo.to_vertex(f[x], a);
        double db = geo.to_vertex(f[x], b);
        std::vector<std::pair<double, double>> allow;
        if (f[x].edge == static_cast<int>(e)) {
          allow.push_back({std::max(0.0, f[x].offset - r), std::min(len, f[x].offset + r)});
        } else {
          if (r >= da) allow.push_back({0.0, std::min(len, r - da)});
          if (r >= db) allow.push_back({std::max(0.0, len - (r - db)), len});
        }
        std::vector<std::pair<double, double>> next;
        for (auto [lo1, hi1] : segs[e]) {
          for (auto [lo2, hi2] : allow) {
            double lo = std::max(lo1, lo2);
            double hi = std::min(hi1, hi2);
            if (hi >= lo) next.push_back({lo, hi});
          }
        }
        std::sort(next.begin(), next.end());
        segs[e] = std::move(next);
      }
    }

    bool any = false;
    for (const auto& s : segs) any = any || !s.empty();
    if (!any) {
      for (size_t i = 0; i < done.size(); ++i) {
        for (size_t j = i + 1; j < done.size(); ++j) {
          int x = done[i], y = done[j];
          if (geo.between(f[x], f[y]) > gdist[v][x] + gdist[v][y] + 2 * tau) {
            fail("InfeasibleExtension",
                 "balls around vertices " + std::to_string(x) + " and " +
                     std::to_string(y) + " of radii " + std::to_string(gdist[v][x]) +
                     " and " + std::to_string(gdist[v][y]) + " do not meet");
          }
        }
      }
      fail("InfeasibleExtension",
           "no tree point lies in every ball for vertex " + std::to_string(v));
    }

    const TreePoint pn = f[from_terminals.parent_vertex[v] >= 0
                              ? from_terminals.parent_vertex[v]
                              : done.front()];
    double best = kInf;
    TreePoint pick;
    for (size_t e = 0; e < t.edges.size(); ++e) {
      if (segs[e].empty()) continue;
      auto [a, b, len] = t.edges[e];
      double da = geo.to_vertex(pn, a);
      double db = geo.to_vertex(pn, b);
      for (auto [lo, hi] : segs[e]) {
        std::vector<double> cands = {lo, hi};
        if (pn.edge == static_cast<int>(e)) cands.push_back(std::clamp(pn.offset, lo, hi));
        for (double c : cands) {
          double dist = (pn.edge == static_cast<int>(e))
                            ? std::abs(c - pn.offset)
                            : std::min(c + da, (len - c) + db);
          if (dist < best) {
            best = dist;
            pick = canonical_point(t, static_cast<int>(e), c, snap);
          }
        }
      }
    }
    f[v] = pick;
    assigned[v] = 1;
    done.push_back(v);
  }
  return f;
}

ComposedLevel compose_orientation(const MetricGraph& g, const MetricTree& t,
                                  const std::vector<TreePoint>& f, int root) {
  validate_graph(g);
  validate_tree(t);
  if (f.size() != g.vertices.size())
    fail("DimensionMismatch", "assignment covers " + std::to_string(f.size()) +
                                  " of " + std::to_string(g.vertices.size()) +
                                  " vertices");
  for (const auto& p : f) check_tree_point(t, p);
  PLFunction rho = orientation_rho(t, root);
  TreeGeometry geo(t);

  auto rho_at = [&](const TreePoint& p) {
    if (p.edge < 0) return rho.values[p.vertex];
    auto [a, b, len] = t.edges[p.edge];
    return std::min(rho.values[a] + p.offset, rho.values[b] + (len - p.offset));
  };

  double scale = 1.0;
  for (const auto& [u, v, len] : g.edges) scale = std::max(scale, len);
  const double tau = 1e-12 * scale;

  ComposedLevel out;
  out.graph.vertices = g.vertices;
  out.graph.terminals = g.terminals;
  out.phi.values.resize(g.vertices.size());
  for (size_t v = 0; v < g.vertices.size(); ++v) out.phi.values[v] = rho_at(f[v]);

  for (const auto& [u, v, len] : g.edges) {
    double ru = out.phi.values[u];
    double rv = out.phi.values[v];
    double lt = geo.between(f[u], f[v]);
    double dip = 0.5 * (ru + rv - lt);
    int next_id = static_cast<int>(out.graph.edges.size());
    if (lt <= tau || dip >= std::min(ru, rv) - tau) {
      out.graph.edges.push_back({u, v, len});
      out.edge_images.push_back({next_id});
      continue;
    }
    // image geodesic walks toward the root and back: split at the turn
    double cut = len * (ru - dip) / lt;
    int w = static_cast<int>(out.graph.vertices.size());
    out.graph.vertices.push_back(w);
    out.phi.values.push_back(dip);
    out.graph.edges.push_back({u, w, cut});
    out.graph.edges.push_back({w, v, len - cut});
    out.edge_images.push_back({next_id, next_id + 1});
  }
  validate_graph(out.graph);
  validate_plfunction(out.graph, out.phi);
  return out;
}

int cut_z2(const MetricGraph& g, const PLFunction& phi, double t) {
  validate_graph(g);
  validate_plfunction(g, phi);
  require_even_terminals(g);
  const double tol = 1e-9 * (1.0 + max_abs_value(phi));
  for (double v : phi.values)
    if (std::abs(v - t) <= tol)
      fail("NonGenericLevel", "level " + std::to_string(t) + " hits a vertex value");
  GraphAdj adj(g);
  std::vector<char> odd = odd_bridge_flags(g, adj);
  int count = 0;
  for (int e = 0; e < static_cast<int>(g.edges.size()); ++e) {
    auto [u, v, len] = g.edges[e];
    if ((phi.values[u] - t) * (phi.values[v] - t) < 0.0 && odd[e]) ++count;
  }
  return count;
}

double lev_z2(const MetricGraph& g, const PLFunction& phi) {
  validate_graph(g);
  validate_plfunction(g, phi);
  require_even_terminals(g);
  GraphAdj adj(g);
  std::vector<char> odd = odd_bridge_flags(g, adj);
  std::vector<double> vals = phi.values;
  std::sort(vals.begin(), vals.end());
  vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
  double total = 0.0;
  for (size_t i = 0; i + 1 < vals.size(); ++i) {
    double mid = 0.5 * (vals[i] + vals[i + 1]);
    int count = 0;
    for (int e = 0; e < static_cast<int>(g.edges.size()); ++e) {
      auto [u, v, len] = g.edges[e];
      if ((phi.values[u] - mid) * (phi.values[v] - mid) < 0.0 && odd[e]) ++count;
    }
    total += (vals[i + 1] - vals[i]) * count;
  }
  return total;
}

int cut_z(const MetricGraph& g, const PLFunction& phi, double t, const Partition2& pi) {
  validate_graph(g);
  validate_plfunction(g, phi);
  validate_graph_partition(g, pi);
  int balance = 0;
  for (int x : pi.plus)
    if (phi.values[x] <= t) ++balance;
  for (int x : pi.minus)
    if (phi.values[x] <= t) --balance;
  return std::abs(balance);
}

double lev_z(const MetricGraph& g, const PLFunction& phi, const Partition2& pi) {
  validate_graph(g);
  validate_plfunction(g, phi);
  validate_graph_partition(g, pi);
  std::vector<std::pair<double, int>> events;
  for (int x : pi.plus) events.push_back({phi.values[x], +1});
  for (int x : pi.minus) events.push_back({phi.values[x], -1});
  std::sort(events.begin(), events.end());
  double total = 0.0;
  int acc = 0;
  double prev = events.empty() ? 0.0 : events.front().first;
  for (const auto& [val, sign] : events) {
    total += std::abs(acc) * (val - prev);
    acc += sign;
    prev = val;
  }
  return total;
}

double chain_action(const MetricGraph& g, const Chain2& c, const PLFunction& phi) {
  validate_graph(g);
  validate_plfunction(g, phi);
  std::set<int> seen;
  double total = 0.0;
  for (int e : c.edges) {
    if (e < 0 || e >= static_cast<int>(g.edges.size()))
      fail("InvalidInput", "chain edge id out of range");
    if (!seen.insert(e).second) fail("InvalidInput", "chain repeats an edge");
    auto [u, v, len] = g.edges[e];
    total += std::abs(phi.values[u] - phi.values[v]);
  }
  return total;
}

PLFunction kantorovich_extend(const MetricGraph& g, const Partition2& pi) {
  validate_graph(g);
  validate_graph_partition(g, pi);
  FiniteMetric m = shortest_path_metric(g);
  std::vector<int> index_of(g.vertices.size(), -1);
  for (size_t k = 0; k < g.terminals.size(); ++k) index_of[g.terminals[k]] = static_cast<int>(k);
  Partition2 idx;
  for (int x : pi.plus) idx.plus.push_back(index_of[x]);
  for (int x : pi.minus) idx.minus.push_back(index_of[x]);
  std::vector<double> f = kantorovich_potential(m, idx);

  GraphAdj adj(g);
  PLFunction out;
  out.values.assign(g.vertices.size(), kInf);
  for (int j : idx.minus) {
    Dijkstra d = dijkstra(g, adj, {g.terminals[j]});
    for (size_t v = 0; v < g.vertices.size(); ++v)
      out.values[v] = std::min(out.values[v], f[j] + d.dist[v]);
  }
  return out;
}

}  // namespace treematch
