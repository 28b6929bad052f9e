#include "treematch/blossom.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "treematch/error.hpp"

// Primal-dual maximum weight matching. The blossom bookkeeping follows the
// classic formulation where a blossom dual applies to edges with both ends
// inside the blossom, so the slack of a cross edge only involves vertex
// duals. Labels: 0 free, 1 outer (S), 2 inner (T); bit 4 marks breadcrumbs
// while scanning for a common ancestor.

namespace treematch::detail {

namespace {

constexpr int kNone = -1;

struct Matcher {
  int nvertex;
  int nedge;
  bool maxcardinality;
  double tol;

  std::vector<std::array<int, 2>> ends;
  std::vector<double> weight;

  std::vector<int> endpoint;                    // 2*nedge
  std::vector<std::vector<int>> neighbend;      // v -> remote endpoint indices
  std::vector<int> mate;                        // v -> endpoint index or -1
  std::vector<int> label;                       // 2n
  std::vector<int> labelend;                    // 2n
  std::vector<int> inblossom;                   // n
  std::vector<int> blossomparent;               // 2n
  std::vector<std::vector<int>> blossomchilds;  // 2n
  std::vector<int> blossombase;                 // 2n
  std::vector<std::vector<int>> blossomendps;   // 2n
  std::vector<int> bestedge;                    // 2n
  std::vector<std::vector<int>> blossombestedges;
  std::vector<char> hasbestlist;
  std::vector<int> unusedblossoms;
  std::vector<double> dualvar;  // 2n
  std::vector<char> allowedge;
  std::vector<int> queue;

  Matcher(int nv, const std::vector<std::tuple<int, int, double>>& edges, bool maxcard)
      : nvertex(nv), nedge(static_cast<int>(edges.size())), maxcardinality(maxcard) {
    double maxweight = 0.0;
    ends.resize(nedge);
    weight.resize(nedge);
    for (int k = 0; k < nedge; ++k) {
      const auto& [i, j, w] = edges[k];
      if (i == j || i < 0 || j < 0 || i >= nv || j >= nv)
        fail("InvalidInput", "bad matching edge");
      ends[k] = {i, j};
      weight[k] = w;
      maxweight = std::max(maxweight, std::abs(w));
    }
    tol = 1e-12 * std::max(1.0, maxweight);

    endpoint.resize(2 * nedge);
    neighbend.assign(nvertex, {});
    for (int k = 0; k < nedge; ++k) {
      endpoint[2 * k] = ends[k][0];
      endpoint[2 * k + 1] = ends[k][1];
      neighbend[ends[k][0]].push_back(2 * k + 1);
      neighbend[ends[k][1]].push_back(2 * k);
    }

    mate.assign(nvertex, kNone);
    label.assign(2 * nvertex, 0);
    labelend.assign(2 * nvertex, kNone);
    inblossom.resize(nvertex);
    for (int v = 0; v < nvertex; ++v) inblossom[v] = v;
    blossomparent.assign(2 * nvertex, kNone);
    blossomchilds.assign(2 * nvertex, {});
    blossombase.assign(2 * nvertex, kNone);
    for (int v = 0; v < nvertex; ++v) blossombase[v] = v;
    blossomendps.assign(2 * nvertex, {});
    bestedge.assign(2 * nvertex, kNone);
    blossombestedges.assign(2 * nvertex, {});
    hasbestlist.assign(2 * nvertex, 0);
    for (int b = 2 * nvertex - 1; b >= nvertex; --b) unusedblossoms.push_back(b);
    double init = 0.0;
    for (int k = 0; k < nedge; ++k) init = std::max(init, weight[k]);
    dualvar.assign(2 * nvertex, 0.0);
    for (int v = 0; v < nvertex; ++v) dualvar[v] = init;
    allowedge.assign(nedge, 0);
  }

  double slack(int k) const {
    return dualvar[ends[k][0]] + dualvar[ends[k][1]] - 2.0 * weight[k];
  }

  void check(bool cond, const char* what) const {
    if (!cond) fail("InternalError", std::string("matching invariant broken: ") + what);
  }

  void blossom_leaves(int b, std::vector<int>& out) const {
    if (b < nvertex) {
      out.push_back(b);
      return;
    }
    for (int t : blossomchilds[b]) blossom_leaves(t, out);
  }

  void assign_label(int w, int t, int p) {
    const int b = inblossom[w];
    check(label[w] == 0 && label[b] == 0, "assign_label on labeled node");
    label[w] = label[b] = t;
    labelend[w] = labelend[b] = p;
    bestedge[w] = bestedge[b] = kNone;
    if (t == 1) {
      std::vector<int> leaves;
      blossom_leaves(b, leaves);
      for (int v : leaves) queue.push_back(v);
    } else {
      const int base = blossombase[b];
      check(mate[base] >= 0, "inner blossom with unmatched base");
      assign_label(endpoint[mate[base]], 1, mate[base] ^ 1);
    }
  }

  // Trace back from both sides of an outer-outer edge; returns the first
  // common ancestor base vertex, or -1 when the paths reach distinct roots.
  int scan_blossom(int v, int w) {
    std::vector<int> path;
    int base = kNone;
    while (v != kNone || w != kNone) {
      int b = inblossom[v];
      if (label[b] & 4) {
        base = blossombase[b];
        break;
      }
      check(label[b] == 1, "scan through non-outer node");
      check(static_cast<int>(path.size()) <= 2 * nvertex, "scan trace cycled");
      path.push_back(b);
      label[b] = 5;
      check(labelend[b] == mate[blossombase[b]], "outer labelend mismatch");
      if (labelend[b] == kNone) {
        v = kNone;
      } else {
        v = endpoint[labelend[b]];
        b = inblossom[v];
        check(label[b] == 2, "expected inner node while scanning");
        check(labelend[b] >= 0, "inner node without label edge");
        v = endpoint[labelend[b]];
      }
      if (w != kNone) std::swap(v, w);
    }
    for (int b : path) label[b] = 1;
    return base;
  }

  void add_blossom(int base, int k) {
    int v = ends[k][0];
    int w = ends[k][1];
    const int bb = inblossom[base];
    int bv = inblossom[v];
    int bw = inblossom[w];

    check(!unusedblossoms.empty(), "ran out of blossom slots");
    const int b = unusedblossoms.back();
    unusedblossoms.pop_back();
    blossombase[b] = base;
    blossomparent[b] = kNone;
    blossomparent[bb] = b;

    auto& path = blossomchilds[b];
    auto& endps = blossomendps[b];
    path.clear();
    endps.clear();

    while (bv != bb) {
      check(static_cast<int>(path.size()) <= 2 * nvertex, "blossom trace cycled");
      blossomparent[bv] = b;
      path.push_back(bv);
      endps.push_back(labelend[bv]);
      check(label[bv] == 2 || (label[bv] == 1 && labelend[bv] == mate[blossombase[bv]]),
            "unexpected label while building blossom");
      check(labelend[bv] >= 0, "missing label edge while building blossom");
      v = endpoint[labelend[bv]];
      bv = inblossom[v];
    }
    path.push_back(bb);
    std::reverse(path.begin(), path.end());
    std::reverse(endps.begin(), endps.end());
    endps.push_back(2 * k);
    while (bw != bb) {
      check(static_cast<int>(path.size()) <= 2 * nvertex, "blossom trace cycled");
      blossomparent[bw] = b;
      path.push_back(bw);
      endps.push_back(labelend[bw] ^ 1);
      check(label[bw] == 2 || (label[bw] == 1 && labelend[bw] == mate[blossombase[bw]]),
            "unexpected label while building blossom");
      check(labelend[bw] >= 0, "missing label edge while building blossom");
      w = endpoint[labelend[bw]];
      bw = inblossom[w];
    }

    check(label[bb] == 1, "blossom base is not outer");
    label[b] = 1;
    labelend[b] = labelend[bb];
    dualvar[b] = 0.0;

    std::vector<int> leaves;
    blossom_leaves(b, leaves);
    for (int leaf : leaves) {
      if (label[inblossom[leaf]] == 2) queue.push_back(leaf);
      inblossom[leaf] = b;
    }

    // least-slack edges from the new blossom to every other outer blossom
    std::vector<int> bestedgeto(2 * nvertex, kNone);
    for (int child : path) {
      std::vector<std::vector<int>> nblists;
      if (!hasbestlist[child]) {
        std::vector<int> childleaves;
        blossom_leaves(child, childleaves);
        for (int leaf : childleaves) {
          nblists.emplace_back();
          for (int p : neighbend[leaf]) nblists.back().push_back(p / 2);
        }
      } else {
        nblists.push_back(blossombestedges[child]);
      }
      for (const auto& nblist : nblists) {
        for (int kk : nblist) {
          int j = ends[kk][1];
          if (inblossom[j] == b) j = ends[kk][0];
          const int bj = inblossom[j];
          if (bj != b && label[bj] == 1 &&
              (bestedgeto[bj] == kNone || slack(kk) < slack(bestedgeto[bj])))
            bestedgeto[bj] = kk;
        }
      }
      blossombestedges[child].clear();
      hasbestlist[child] = 0;
      bestedge[child] = kNone;
    }
    blossombestedges[b].clear();
    for (int kk : bestedgeto)
      if (kk != kNone) blossombestedges[b].push_back(kk);
    hasbestlist[b] = 1;
    bestedge[b] = kNone;
    for (int kk : blossombestedges[b])
      if (bestedge[b] == kNone || slack(kk) < slack(bestedge[b])) bestedge[b] = kk;
  }

  void expand_blossom(int b, bool endstage) {
    const auto childs = blossomchilds[b];  // copy; b may be recycled below
    const int len = static_cast<int>(childs.size());
    auto child_at = [&](int j) { return childs[((j % len) + len) % len]; };
    auto endp_at = [&](int j) {
      const auto& e = blossomendps[b];
      return e[((j % len) + len) % len];
    };

    for (int s : childs) {
      blossomparent[s] = kNone;
      if (s < nvertex) {
        inblossom[s] = s;
      } else if (endstage && dualvar[s] <= tol) {
        expand_blossom(s, endstage);
      } else {
        std::vector<int> leaves;
        blossom_leaves(s, leaves);
        for (int v : leaves) inblossom[v] = s;
      }
    }

    if (!endstage && label[b] == 2) {
      check(labelend[b] >= 0, "inner blossom without label edge");
      const int entrychild = inblossom[endpoint[labelend[b] ^ 1]];
      int j = static_cast<int>(std::find(childs.begin(), childs.end(), entrychild) - childs.begin());
      int jstep, endptrick;
      if (j & 1) {
        j -= len;
        jstep = 1;
        endptrick = 0;
      } else {
        jstep = -1;
        endptrick = 1;
      }
      int p = labelend[b];
      while (j != 0) {
        label[endpoint[p ^ 1]] = 0;
        label[endpoint[endp_at(j - endptrick) ^ endptrick ^ 1]] = 0;
        assign_label(endpoint[p ^ 1], 2, p);
        allowedge[endp_at(j - endptrick) / 2] = 1;
        j += jstep;
        p = endp_at(j - endptrick) ^ endptrick;
        allowedge[p / 2] = 1;
        j += jstep;
      }
      // relabel the base T-sub-blossom without stepping through to its mate
      int bv = child_at(j);
      label[endpoint[p ^ 1]] = 2;
      label[bv] = 2;
      labelend[endpoint[p ^ 1]] = p;
      labelend[bv] = p;
      bestedge[bv] = kNone;
      j += jstep;
      while (child_at(j) != entrychild) {
        bv = child_at(j);
        if (label[bv] == 1) {
          j += jstep;
          continue;
        }
        std::vector<int> leaves;
        blossom_leaves(bv, leaves);
        int lv = kNone;
        for (int leaf : leaves)
          if (label[leaf] != 0) {
            lv = leaf;
            break;
          }
        if (lv != kNone) {
          check(label[lv] == 2, "expected inner leaf in expanded blossom");
          check(inblossom[lv] == bv, "leaf blossom mismatch");
          label[lv] = 0;
          label[endpoint[mate[blossombase[bv]]]] = 0;
          assign_label(lv, 2, labelend[lv]);
        }
        j += jstep;
      }
    }

    label[b] = kNone;
    labelend[b] = kNone;
    blossomchilds[b].clear();
    blossomendps[b].clear();
    blossombase[b] = kNone;
    blossombestedges[b].clear();
    hasbestlist[b] = 0;
    bestedge[b] = kNone;
    unusedblossoms.push_back(b);
  }

  // Rematch the interior of blossom b so that vertex v becomes the base.
  void augment_blossom(int b, int v) {
    int t = v;
    while (blossomparent[t] != b) t = blossomparent[t];
    if (t >= nvertex) augment_blossom(t, v);

    auto& childs = blossomchilds[b];
    auto& endps = blossomendps[b];
    const int len = static_cast<int>(childs.size());
    auto child_at = [&](int j) { return childs[((j % len) + len) % len]; };
    auto endp_at = [&](int j) { return endps[((j % len) + len) % len]; };

    const int i = static_cast<int>(std::find(childs.begin(), childs.end(), t) - childs.begin());
    int j = i;
    int jstep, endptrick;
    if (i & 1) {
      j -= len;
      jstep = 1;
      endptrick = 0;
    } else {
      jstep = -1;
      endptrick = 1;
    }
    while (j != 0) {
      j += jstep;
      int tt = child_at(j);
      const int p = endp_at(j - endptrick) ^ endptrick;
      if (tt >= nvertex) augment_blossom(tt, endpoint[p]);
      j += jstep;
      tt = child_at(j);
      if (tt >= nvertex) augment_blossom(tt, endpoint[p ^ 1]);
      mate[endpoint[p]] = p ^ 1;
      mate[endpoint[p ^ 1]] = p;
    }
    std::rotate(childs.begin(), childs.begin() + i, childs.end());
    std::rotate(endps.begin(), endps.begin() + i, endps.end());
    blossombase[b] = blossombase[childs[0]];
    check(blossombase[b] == v, "blossom base rotation failed");
  }

  void augment_matching(int k) {
    const int v0 = ends[k][0];
    const int w0 = ends[k][1];
    const std::array<std::array<int, 2>, 2> sides = {{{v0, 2 * k + 1}, {w0, 2 * k}}};
    for (const auto& side : sides) {
      int s = side[0];
      int p = side[1];
      while (true) {
        const int bs = inblossom[s];
        check(label[bs] == 1, "augment through non-outer node");
        check(labelend[bs] == mate[blossombase[bs]], "outer labelend mismatch in augment");
        if (bs >= nvertex) augment_blossom(bs, s);
        mate[s] = p;
        if (labelend[bs] == kNone) break;
        const int t = endpoint[labelend[bs]];
        const int bt = inblossom[t];
        check(label[bt] == 2, "expected inner node in augment");
        check(labelend[bt] >= 0, "inner node without label edge in augment");
        s = endpoint[labelend[bt]];
        const int j = endpoint[labelend[bt] ^ 1];
        check(blossombase[bt] == t, "inner base mismatch in augment");
        if (bt >= nvertex) augment_blossom(bt, j);
        mate[j] = labelend[bt];
        p = labelend[bt] ^ 1;
      }
    }
  }

  std::vector<int> run() {
    long long guard = 0;
    const long long guard_limit =
        2000LL + 200LL * static_cast<long long>(nvertex) * nvertex * std::max(16, nvertex);

    for (int stage = 0; stage < nvertex; ++stage) {
      std::fill(label.begin(), label.end(), 0);
      std::fill(bestedge.begin(), bestedge.end(), kNone);
      for (int b = nvertex; b < 2 * nvertex; ++b) {
        blossombestedges[b].clear();
        hasbestlist[b] = 0;
      }
      std::fill(allowedge.begin(), allowedge.end(), 0);
      queue.clear();

      for (int v = 0; v < nvertex; ++v)
        if (mate[v] == kNone && label[inblossom[v]] == 0) assign_label(v, 1, kNone);

      bool augmented = false;
      while (true) {
        while (!queue.empty() && !augmented) {
          const int v = queue.back();
          queue.pop_back();
          check(label[inblossom[v]] == 1, "queued vertex not outer");
          for (int p : neighbend[v]) {
            if (++guard > guard_limit) fail("IterationLimit", "matching scan did not converge");
            const int k = p / 2;
            const int w = endpoint[p];
            if (inblossom[v] == inblossom[w]) continue;
            double kslack = 0.0;
            if (!allowedge[k]) {
              kslack = slack(k);
              if (kslack <= tol) allowedge[k] = 1;
            }
            if (allowedge[k]) {
              if (label[inblossom[w]] == 0) {
                assign_label(w, 2, p ^ 1);
              } else if (label[inblossom[w]] == 1) {
                const int base = scan_blossom(v, w);
                if (base >= 0) {
                  add_blossom(base, k);
                } else {
                  augment_matching(k);
                  augmented = true;
                  break;
                }
              } else if (label[w] == 0) {
                label[w] = 2;
                labelend[w] = p ^ 1;
              }
            } else if (label[inblossom[w]] == 1) {
              const int b = inblossom[v];
              if (bestedge[b] == kNone || kslack < slack(bestedge[b])) bestedge[b] = k;
            } else if (label[w] == 0) {
              if (bestedge[w] == kNone || kslack < slack(bestedge[w])) bestedge[w] = k;
            }
          }
        }
        if (augmented) break;

        // dual update
        int deltatype = -1;
        double delta = 0.0;
        int deltaedge = kNone;
        int deltablossom = kNone;

        if (!maxcardinality) {
          deltatype = 1;
          delta = std::numeric_limits<double>::infinity();
          for (int v = 0; v < nvertex; ++v) delta = std::min(delta, dualvar[v]);
        }
        for (int v = 0; v < nvertex; ++v) {
          if (label[inblossom[v]] == 0 && bestedge[v] != kNone) {
            const double d = slack(bestedge[v]);
            if (deltatype == -1 || d < delta) {
              delta = d;
              deltatype = 2;
              deltaedge = bestedge[v];
            }
          }
        }
        for (int b = 0; b < 2 * nvertex; ++b) {
          if (blossomparent[b] == kNone && label[b] == 1 && bestedge[b] != kNone) {
            const double d = 0.5 * slack(bestedge[b]);
            if (deltatype == -1 || d < delta) {
              delta = d;
              deltatype = 3;
              deltaedge = bestedge[b];
            }
          }
        }
        for (int b = nvertex; b < 2 * nvertex; ++b) {
          if (blossombase[b] >= 0 && blossomparent[b] == kNone && label[b] == 2 &&
              (deltatype == -1 || dualvar[b] < delta)) {
            delta = dualvar[b];
            deltatype = 4;
            deltablossom = b;
          }
        }
        if (deltatype == -1) {
          // max-cardinality optimum reached
          check(maxcardinality, "stalled without max cardinality mode");
          deltatype = 1;
          delta = 0.0;
          for (int v = 0; v < nvertex; ++v) delta = std::min(delta, dualvar[v]);
          delta = std::max(0.0, delta);
        }
        if (delta < -1e-6) fail("InternalError", "negative dual step in matching");
        delta = std::max(delta, 0.0);

        for (int v = 0; v < nvertex; ++v) {
          const int lb = label[inblossom[v]];
          if (lb == 1)
            dualvar[v] -= delta;
          else if (lb == 2)
            dualvar[v] += delta;
        }
        for (int b = nvertex; b < 2 * nvertex; ++b) {
          if (blossombase[b] >= 0 && blossomparent[b] == kNone) {
            if (label[b] == 1)
              dualvar[b] += delta;
            else if (label[b] == 2)
              dualvar[b] -= delta;
          }
        }

        if (++guard > guard_limit) fail("IterationLimit", "matching dual updates did not converge");

        if (deltatype == 1) break;
        if (deltatype == 2) {
          allowedge[deltaedge] = 1;
          int i = ends[deltaedge][0];
          if (label[inblossom[i]] == 0) i = ends[deltaedge][1];
          check(label[inblossom[i]] == 1, "delta2 edge without outer end");
          queue.push_back(i);
        } else if (deltatype == 3) {
          allowedge[deltaedge] = 1;
          queue.push_back(ends[deltaedge][0]);
        } else if (deltatype == 4) {
          expand_blossom(deltablossom, false);
        }
      }

      if (!augmented) break;

      for (int b = nvertex; b < 2 * nvertex; ++b)
        if (blossomparent[b] == kNone && blossombase[b] >= 0 && label[b] == 1 &&
            dualvar[b] <= tol)
          expand_blossom(b, true);
    }

    std::vector<int> result(nvertex, kNone);
    for (int v = 0; v < nvertex; ++v)
      if (mate[v] != kNone) result[v] = endpoint[mate[v]];
    for (int v = 0; v < nvertex; ++v)
      check(result[v] == kNone || result[result[v]] == v, "mate array inconsistent");
    return result;
  }
};

}  // namespace

std::vector<int> max_weight_matching(int nvertex,
                                     const std::vector<std::tuple<int, int, double>>& edges,
                                     bool max_cardinality) {
  if (nvertex <= 0) return {};
  Matcher m(nvertex, edges, max_cardinality);
  return m.run();
}

}  // namespace treematch::detail
