#pragma once

#include <tuple>
#include <vector>

namespace treematch::detail {

// Maximum weight matching on a general graph (primal-dual with blossom
// shrinking, O(n^3)-ish on dense inputs). Edges are (u, v, weight) with
// u != v. When max_cardinality is set the result has maximum cardinality
// and maximum weight among those. Returns mate[v] (partner vertex or -1).
std::vector<int> max_weight_matching(
    int nvertex, const std::vector<std::tuple<int, int, double>>& edges,
    bool max_cardinality);

}  // namespace treematch::detail
