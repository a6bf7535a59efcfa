#include "timely/simplex.hpp"

#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>

#include "timely/errors.hpp"

namespace timely {
namespace {

constexpr double kReducedCostTol = 1e-9;
constexpr double kPivotTol = 1e-11;

}  // namespace

SimplexResult solve_max_lp(const std::vector<std::vector<double>>& a,
                           const std::vector<double>& b,
                           const std::vector<double>& c) {
  const size_t m = a.size();
  const size_t n = c.size();
  if (b.size() != m) throw std::invalid_argument("b size != row count");
  for (const auto& row : a)
    if (row.size() != n) throw std::invalid_argument("A row size != c size");
  for (double bi : b)
    if (!(bi >= 0.0))
      throw std::invalid_argument("solve_max_lp requires b >= 0");

  // Tableau: m constraint rows + objective row; columns are the n
  // structural variables, m slacks, then the right-hand side.
  const size_t cols = n + m + 1;
  std::vector<std::vector<double>> t(m + 1, std::vector<double>(cols, 0.0));
  for (size_t r = 0; r < m; ++r) {
    for (size_t j = 0; j < n; ++j) t[r][j] = a[r][j];
    t[r][n + r] = 1.0;
    t[r][cols - 1] = b[r];
  }
  for (size_t j = 0; j < n; ++j) t[m][j] = -c[j];

  std::vector<size_t> basis(m);
  for (size_t r = 0; r < m; ++r) basis[r] = n + r;

  // Bland's rule terminates in finitely many pivots; the cap only guards
  // against an implementation bug turning into a hang.
  const size_t max_pivots = 1000 + 100 * (m + n) * (m + n);
  for (size_t pivot_count = 0;; ++pivot_count) {
    if (pivot_count > max_pivots)
      throw NumericalFailure("simplex exceeded its pivot cap");

    // Entering: lowest-index column with a negative reduced cost.
    size_t enter = cols;
    for (size_t j = 0; j + 1 < cols; ++j) {
      if (t[m][j] < -kReducedCostTol) {
        enter = j;
        break;
      }
    }
    if (enter == cols) break;  // optimal

    // Leaving: minimum ratio, ties to the smallest basic variable index.
    size_t leave = m;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (size_t r = 0; r < m; ++r) {
      if (t[r][enter] <= kPivotTol) continue;
      double ratio = t[r][cols - 1] / t[r][enter];
      if (ratio < best_ratio - 0.0 ||
          (ratio == best_ratio && (leave == m || basis[r] < basis[leave]))) {
        best_ratio = ratio;
        leave = r;
      }
    }
    if (leave == m)
      throw NumericalFailure("LP is unbounded along variable " +
                             std::to_string(enter));

    // Gauss-Jordan pivot.
    const double piv = t[leave][enter];
    for (size_t j = 0; j < cols; ++j) t[leave][j] /= piv;
    t[leave][enter] = 1.0;
    for (size_t r = 0; r <= m; ++r) {
      if (r == leave) continue;
      const double f = t[r][enter];
      if (f == 0.0) continue;
      for (size_t j = 0; j < cols; ++j) t[r][j] -= f * t[leave][j];
      t[r][enter] = 0.0;
    }
    basis[leave] = enter;
  }

  SimplexResult result;
  result.x.assign(n, 0.0);
  for (size_t r = 0; r < m; ++r) {
    if (basis[r] < n) {
      double v = t[r][cols - 1];
      result.x[basis[r]] = v < 0.0 ? 0.0 : v;  // clamp -0/eps noise
    }
  }
  result.objective = t[m][cols - 1];
  return result;
}

}  // namespace timely
