#include "timely/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>

#include "timely/delivery.hpp"

namespace timely {
namespace {

void check(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

double max_weight(const Instance& instance) {
  double w = 1.0;
  for (double wj : instance.weights) w = std::max(w, wj);
  return w;
}

}  // namespace

double binomial_coefficient(int n, int k) {
  check(n >= 0 && k >= 0, "binomial coefficient needs n >= 0 and k >= 0");
  if (k > n) return 0.0;
  if (k > n - k) k = n - k;
  if (n <= 60) {
    // r * (n - k + i) is divisible by i at every step and fits in 64 bits
    // up to n = 60 (C(60, 30) * 60 < 2^63).
    std::uint64_t r = 1;
    for (int i = 1; i <= k; ++i)
      r = r * static_cast<std::uint64_t>(n - k + i) /
          static_cast<std::uint64_t>(i);
    return static_cast<double>(r);
  }
  return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
                  std::lgamma(n - k + 1.0));
}

GapReport make_gap_report(double c_t3, double c_det, int n_aps,
                          double w_max) {
  check(n_aps >= 1, "need at least one AP");
  check(w_max >= 1.0, "weights are at least 1");
  const double n = n_aps;

  GapReport report;
  report.c_t3 = c_t3;
  report.c_det = c_det;
  report.lower_bound = c_det - 2.0 * w_max * std::sqrt(n * (c_det + n / 4.0));
  report.upper_bound = c_det + n * w_max;
  report.lower_ok = report.lower_bound < report.c_t3;
  report.upper_ok = report.c_t3 < report.upper_bound;
  return report;
}

GapReport gap_report(const Instance& instance, const SearchOptions& search,
                     const GapOptions& gap) {
  return make_gap_report(exact_capacity(instance, search).value,
                         solve_gap_exact(instance, gap).objective,
                         instance.n_aps, max_weight(instance));
}

double assignment_guarantee_floor(double c_t3, int n_aps) {
  check(n_aps >= 1, "need at least one AP");
  const double n = n_aps;
  check(c_t3 >= 7.0 * n / 4.0, "floor needs capacity at least 7n/4");
  return c_t3 - n - 2.0 * std::sqrt(n * (c_t3 - 3.0 * n / 4.0));
}

double rounded_guarantee_floor(double c_t3, int n_aps) {
  check(n_aps >= 1, "need at least one AP");
  const double n = n_aps;
  check(c_t3 > 11.0 * n / 4.0, "floor needs capacity above 11n/4");
  return c_t3 - 2.0 * n - 2.0 * std::sqrt(n * (c_t3 - 7.0 * n / 4.0));
}

TightUpperResult tight_upper_instance(int n_aps, int c_det_target,
                                      double epsilon, int tau) {
  check(n_aps >= 1, "need at least one AP");
  check(c_det_target >= 0 && c_det_target % n_aps == 0,
        "packing target must be a nonnegative multiple of n_aps");
  check(epsilon > 0.0 && epsilon < n_aps, "epsilon must be in (0, n_aps)");
  const int per_ap = c_det_target / n_aps;
  if (tau == 0) tau = per_ap + 2;
  check(tau >= per_ap + 2, "tau must be at least c_det_target / n_aps + 2");

  TightUpperResult result;
  const int m = n_aps * tau;
  const double p =
      (c_det_target + n_aps - epsilon) / (static_cast<double>(n_aps) * tau);
  result.success_prob = p;

  result.instance = build_instance(
      n_aps, m, tau,
      std::vector<std::vector<double>>(
          static_cast<size_t>(n_aps),
          std::vector<double>(static_cast<size_t>(m), p)));

  std::vector<int> owner(static_cast<size_t>(m));
  for (int j = 0; j < m; ++j) owner[static_cast<size_t>(j)] = j / tau;
  result.partition = partition_from_owner(result.instance, std::move(owner));

  // Re-measure the packing side independently: identical items, so the
  // optimum is n_aps times what one bin holds.
  const std::vector<double> sizes(static_cast<size_t>(tau), 1.0 / p);
  result.packed_per_ap = pack_count(sizes, tau);
  result.c_det = static_cast<double>(n_aps) * result.packed_per_ap;

  result.c_t3 = evaluate_partition(result.instance, result.partition);
  result.analytic_gap = n_aps - epsilon;
  result.measured_gap = result.c_t3 - result.c_det;
  return result;
}

TightLowerResult tight_lower_instance(int n_aps, int c_det_target, int tau) {
  check(n_aps >= 1, "need at least one AP");
  check(c_det_target >= n_aps && c_det_target % n_aps == 0,
        "packing target must be a positive multiple of n_aps");
  const int per_ap = c_det_target / n_aps;
  check(tau > per_ap, "tau must exceed c_det_target / n_aps");

  TightLowerResult result;
  const double p =
      static_cast<double>(c_det_target) / (static_cast<double>(n_aps) * tau);
  result.success_prob = p;

  const int m = c_det_target;
  result.instance = build_instance(
      n_aps, m, tau,
      std::vector<std::vector<double>>(
          static_cast<size_t>(n_aps),
          std::vector<double>(static_cast<size_t>(m), p)));

  std::vector<int> owner(static_cast<size_t>(m));
  for (int j = 0; j < m; ++j) owner[static_cast<size_t>(j)] = j / per_ap;
  result.partition = partition_from_owner(result.instance, std::move(owner));

  const std::vector<double> sizes(static_cast<size_t>(per_ap), 1.0 / p);
  result.packed_per_ap = pack_count(sizes, tau);
  result.c_det = static_cast<double>(n_aps) * result.packed_per_ap;

  result.c_t3 = evaluate_partition(result.instance, result.partition);
  result.measured_gap = result.c_det - result.c_t3;
  result.closed_form_gap =
      static_cast<double>(n_aps) * equal_p_gap_closed_form(p, tau);
  result.order_floor = static_cast<double>(n_aps) * std::exp(-1.0 / 6.0) *
                       std::sqrt((1.0 - p) / (2.0 * std::numbers::pi)) *
                       std::sqrt(static_cast<double>(per_ap));
  return result;
}

DeliveryBoundsReport delivery_bounds_check(std::span<const double> probs,
                                           int tau) {
  check(tau >= 1, "interval length must be at least 1 slot");
  for (size_t i = 0; i < probs.size(); ++i) {
    check(probs[i] > 0.0 && probs[i] <= 1.0,
          "probabilities must lie in (0, 1]");
    check(i == 0 || probs[i] <= probs[i - 1],
          "probabilities must be nonincreasing");
  }

  std::vector<double> sizes;
  sizes.reserve(probs.size());
  for (double p : probs) sizes.push_back(1.0 / p);

  DeliveryBoundsReport report;
  report.packed_count = pack_count(sizes, tau);
  report.expected = expected_deliveries(probs, tau);

  const double l = report.packed_count;
  report.lower = l - 2.0 * std::sqrt(l + 0.25);
  report.upper = l + 1.0;
  report.lower_ok = report.lower < report.expected;
  report.upper_ok = report.expected < report.upper;

  report.margin_rhs = 2.0 * std::sqrt(l + 0.25);
  if (report.packed_count > 1) {
    double lhs = 1.0;
    for (int i = 1; i < report.packed_count; ++i) {
      const double d = static_cast<double>(report.packed_count - i);
      lhs += std::min(1.0, static_cast<double>(i) / (d * d));
    }
    report.margin_lhs = lhs;
    report.margin_ok = report.margin_lhs < report.margin_rhs;
  } else {
    report.margin_lhs = 0.0;
    report.margin_ok = true;
  }
  return report;
}

double equal_p_gap_closed_form(double p, int tau) {
  check(p > 0.0 && p < 1.0, "probability must be in (0, 1)");
  check(tau >= 1, "interval length must be at least 1 slot");
  const double scaled = p * tau;
  const long long l = std::llround(scaled);
  check(l >= 1 && std::abs(scaled - static_cast<double>(l)) <= 1e-9,
        "p * tau must be a positive integer");
  const int li = static_cast<int>(l);
  return static_cast<double>(li) * binomial_coefficient(tau - 1, li) *
         std::pow(p, li) * std::pow(1.0 - p, tau - li);
}

}  // namespace timely
