#pragma once

#include <utility>
#include <vector>

namespace treematch {

// One linear constraint: sum of coef * x[idx] >= rhs.
struct LpRow {
  std::vector<std::pair<int, double>> terms;
  double rhs = 0.0;
};

struct LpResult {
  std::vector<double> x;
  double objective = 0.0;
  int iterations = 0;
};

// Minimize c.x subject to the given >= rows and 0 <= x <= ub.
// Every ub entry must be finite and x = ub must satisfy all rows;
// the solver starts from that point. Throws LPNumericalFailure when
// the tableau degenerates or the iteration guard trips.
LpResult solve_lp_upper_start(const std::vector<double>& c, const std::vector<double>& ub,
                              const std::vector<LpRow>& rows);

}  // namespace treematch
