#pragma once

#include <span>

#include "timely/capacity.hpp"
#include "timely/gap.hpp"
#include "timely/instance.hpp"

namespace timely {

// Sandwich of the exact interval capacity between the two deterministic
// packing bounds.  With client weights, both offsets scale by the largest
// weight:
//   det - 2 w_max sqrt(N (det + N/4))  <  exact  <  det + N w_max.
struct GapReport {
  double c_t3 = 0.0;         // exact capacity (best static partition)
  double c_det = 0.0;        // packing optimum
  double lower_bound = 0.0;  // c_det - 2 w_max sqrt(n (c_det + n/4))
  double upper_bound = 0.0;  // c_det + n w_max
  bool lower_ok = false;     // lower_bound < c_t3
  bool upper_ok = false;     // c_t3 < upper_bound
};

GapReport gap_report(const Instance& instance,
                     const SearchOptions& search = {},
                     const GapOptions& gap = {});

// Same report from already-computed values (no solving).
GapReport make_gap_report(double c_t3, double c_det, int n_aps,
                          double w_max = 1.0);

// Worst-case floor on what the greedy static policy built from the exact
// packing assignment delivers, as a function of the true capacity c.
// Requires c >= 7n/4.
double assignment_guarantee_floor(double c_t3, int n_aps);

// Same floor for the assignment obtained by rounding down a basic optimal
// LP point instead of solving the packing exactly.  Requires c > 11n/4.
double rounded_guarantee_floor(double c_t3, int n_aps);

// Family of instances where the capacity approaches the packing value plus
// n_aps: every success probability equals (c + n - eps) / (n tau), every AP
// serves tau clients, and the gap lands exactly at n - eps.
struct TightUpperResult {
  Instance instance;
  Partition partition;      // client j on AP j / tau
  double success_prob = 0.0;
  int packed_per_ap = 0;    // clients the packing fits per AP: c / n
  double c_det = 0.0;       // n * packed_per_ap, re-measured by packing
  double c_t3 = 0.0;        // partition value, equals n tau p
  double analytic_gap = 0.0;  // n - eps
  double measured_gap = 0.0;  // c_t3 - c_det
};

// c_det_target must be a nonnegative multiple of n_aps and needs
// tau >= c_det_target / n_aps + 2 so the packing saturates below tau.
// Pass tau = 0 to use that smallest workable value.
TightUpperResult tight_upper_instance(int n_aps, int c_det_target,
                                      double epsilon, int tau = 0);

// Family showing the other side of the sandwich is tight in order: equal
// probabilities p = c / (n tau) with exactly l = c / n clients per AP leave
// a packing-minus-capacity gap of exactly
//   n l C(tau-1, l) p^l (1-p)^(tau-l),
// which grows like sqrt(n c).
struct TightLowerResult {
  Instance instance;
  Partition partition;      // client j on AP j / l
  double success_prob = 0.0;
  int packed_per_ap = 0;    // l = c / n
  double c_det = 0.0;
  double c_t3 = 0.0;        // n * E[deliveries of l packets]
  double closed_form_gap = 0.0;
  double measured_gap = 0.0;  // c_det - c_t3
  double order_floor = 0.0;   // n e^(-1/6) sqrt((1-p)/(2 pi)) sqrt(l)
};

// c_det_target must be a positive multiple of n_aps; tau must exceed
// c_det_target / n_aps so the probability stays below one.
TightLowerResult tight_lower_instance(int n_aps, int c_det_target, int tau);

// Per-AP sanity bounds on the expected deliveries of one greedy list:
// with l the number of slot costs 1/p that fit in tau,
//   l - 2 sqrt(l + 1/4)  <  E[deliveries]  <  l + 1.
// Also evaluates the arithmetic margin inequality behind the lower bound,
//   1 + sum_{i<l} min(1, i / (l-i)^2)  <  2 sqrt(l + 1/4),
// which bites only for integer l > 1 (reported vacuously true otherwise).
struct DeliveryBoundsReport {
  int packed_count = 0;  // l
  double expected = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  bool lower_ok = false;
  bool upper_ok = false;
  double margin_lhs = 0.0;
  double margin_rhs = 0.0;
  bool margin_ok = false;
};

// probs must be nonincreasing with every entry in (0, 1].
DeliveryBoundsReport delivery_bounds_check(std::span<const double> probs,
                                           int tau);

// Exact packing-minus-delivery gap for one AP serving l clients of equal
// probability p when p * tau is exactly the integer l:
//   l C(tau-1, l) p^l (1-p)^(tau-l).
double equal_p_gap_closed_form(double p, int tau);

// C(n, k) as a double: exact integer arithmetic for n <= 60, a log-gamma
// evaluation above that.  k > n yields 0.
double binomial_coefficient(int n, int k);

}  // namespace timely
