#pragma once

#include <vector>

namespace timely {

struct SimplexResult {
  std::vector<double> x;  // structural variables only
  double objective = 0.0;
};

// Maximizes c.x subject to A x <= b, x >= 0, with every b_i >= 0 so the
// slack basis is feasible from the start.  Dense tableau, Bland's rule for
// both the entering and the leaving choice, which rules out cycling; the
// returned solution is therefore always a basic feasible one (a vertex).
//
// Throws std::invalid_argument on shape errors or negative b, and
// NumericalFailure if the problem is unbounded or a pivot cannot be
// certified.
SimplexResult solve_max_lp(const std::vector<std::vector<double>>& a,
                           const std::vector<double>& b,
                           const std::vector<double>& c);

}  // namespace timely
