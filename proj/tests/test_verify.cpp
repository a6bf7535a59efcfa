#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "testgen.hpp"
#include "timely/capacity.hpp"
#include "timely/gap.hpp"
#include "timely/verify.hpp"

using timely::assignment_guarantee_floor;
using timely::binomial_coefficient;
using timely::build_instance;
using timely::delivery_bounds_check;
using timely::equal_p_gap_closed_form;
using timely::gap_report;
using timely::make_gap_report;
using timely::rounded_guarantee_floor;
using timely::tight_lower_instance;
using timely::tight_upper_instance;

TEST_CASE("binomial coefficients") {
  CHECK(binomial_coefficient(0, 0) == 1.0);
  CHECK(binomial_coefficient(5, 7) == 0.0);
  CHECK(binomial_coefficient(7, 0) == 1.0);
  CHECK(binomial_coefficient(52, 5) == 2598960.0);
  // Largest exact case: the integer route must not overflow.
  CHECK(binomial_coefficient(60, 30) == 118264581564861424.0);
  // Above 60 the log-gamma route takes over; it only needs to be close.
  CHECK(binomial_coefficient(100, 3) ==
        doctest::Approx(161700.0).epsilon(1e-9));
  CHECK_THROWS_AS(binomial_coefficient(-1, 0), std::invalid_argument);
  CHECK_THROWS_AS(binomial_coefficient(3, -1), std::invalid_argument);
}

TEST_CASE("capacity sandwich on the two-by-two half instance") {
  const auto instance = build_instance(2, 2, 1, {{0.5, 0.5}, {0.5, 0.5}});
  const auto report = gap_report(instance);
  CHECK(report.c_t3 == 1.0);
  CHECK(report.c_det == 0.0);  // nothing packs: items cost 2 against tau 1
  CHECK(report.lower_bound == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(report.upper_bound == 2.0);
  CHECK(report.lower_ok);
  CHECK(report.upper_ok);
}

TEST_CASE("sandwich is exact for sure channels") {
  // All p = 1: three slots serve three clients per AP, no randomness.
  const auto instance = build_instance(
      2, 10, 3, std::vector<std::vector<double>>(2, std::vector<double>(10, 1.0)));
  const auto report = gap_report(instance);
  CHECK(report.c_t3 == 6.0);
  CHECK(report.c_det == 6.0);
  CHECK(report.lower_ok);
  CHECK(report.upper_ok);
}

TEST_CASE("precomputed reports scale offsets by the largest weight") {
  const auto plain = make_gap_report(10.0, 8.0, 2);
  CHECK(plain.upper_bound == 10.0);
  CHECK(plain.lower_bound ==
        doctest::Approx(8.0 - 2.0 * std::sqrt(2.0 * 8.5)).epsilon(1e-12));
  CHECK(plain.lower_ok);
  CHECK_FALSE(plain.upper_ok);  // 10 < 10 fails: the bound is strict

  const auto weighted = make_gap_report(10.0, 8.0, 2, 3.0);
  CHECK(weighted.upper_bound == 14.0);
  CHECK(weighted.lower_bound ==
        doctest::Approx(8.0 - 6.0 * std::sqrt(2.0 * 8.5)).epsilon(1e-12));
  CHECK(weighted.upper_ok);
}

TEST_CASE("sandwich holds across random instances") {
  testgen::InstanceShape shape;
  shape.max_aps = 3;
  shape.max_clients = 7;
  shape.max_tau = 10;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    shape.weighted = seed % 3 == 0;
    const auto instance = testgen::random_instance(seed + 71000, shape);
    const auto report = gap_report(instance);
    CHECK(report.lower_ok);
    CHECK(report.upper_ok);
    CHECK(report.lower_bound < report.c_t3);
    CHECK(report.c_t3 < report.upper_bound);
  }
}

TEST_CASE("policy floors from the capacity") {
  // At the admissibility edge c = 7n/4 the assignment floor is defined.
  CHECK(assignment_guarantee_floor(3.5, 2) ==
        doctest::Approx(-2.5).epsilon(1e-12));
  CHECK_THROWS_AS(assignment_guarantee_floor(3.49, 2), std::invalid_argument);

  // The rounded-LP floor needs strictly more capacity.
  CHECK(rounded_guarantee_floor(6.0, 2) ==
        doctest::Approx(2.0 - 2.0 * std::sqrt(5.0)).epsilon(1e-12));
  CHECK_THROWS_AS(rounded_guarantee_floor(5.5, 2), std::invalid_argument);

  // Floors grow with capacity.
  double previous = assignment_guarantee_floor(3.5, 2);
  for (double c = 4.0; c <= 12.0; c += 0.5) {
    const double floor_value = assignment_guarantee_floor(c, 2);
    CHECK(floor_value >= previous);
    previous = floor_value;
  }
}

TEST_CASE("packing-driven policies clear their floors on rich instances") {
  // High probabilities and room to spare, so the capacity hypothesis of
  // both floors is comfortably met.
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    testgen::Rand r(seed * 23 + 3);
    const int n = 2;
    const int m = 8;
    const int tau = 10;
    std::vector<std::vector<double>> success(
        static_cast<size_t>(n), std::vector<double>(static_cast<size_t>(m)));
    for (auto& row : success)
      for (double& p : row) p = 0.6 + 0.4 * r.uniform();
    const auto instance = build_instance(n, m, tau, success);

    const double c_t3 = timely::exact_capacity(instance).value;
    if (c_t3 < 7.0 * n / 4.0) continue;

    const auto packed = timely::solve_gap_exact(instance);
    const double assignment_value = timely::evaluate_partition(
        instance, timely::completed_partition(packed, instance));
    CHECK(assignment_value >= assignment_guarantee_floor(c_t3, n) - 1e-9);

    if (c_t3 <= 11.0 * n / 4.0) continue;
    const auto lp = timely::solve_lp_relaxation(instance);
    const double rounded_value = timely::evaluate_partition(
        instance,
        timely::completed_partition(timely::round_down(lp, instance),
                                    instance));
    CHECK(rounded_value >= rounded_guarantee_floor(c_t3, n) - 1e-9);
  }
}

TEST_CASE("upper-side tight family pins the gap at n minus epsilon") {
  const auto result = tight_upper_instance(2, 4, 0.5, 8);
  CHECK(result.success_prob == doctest::Approx(0.34375).epsilon(1e-12));
  CHECK(result.instance.n_clients == 16);
  CHECK(result.packed_per_ap == 2);
  CHECK(result.c_det == 4.0);
  CHECK(result.analytic_gap == doctest::Approx(1.5).epsilon(1e-12));
  // Every AP keeps a packet in flight all interval, so the partition value
  // is exactly n tau p.
  CHECK(result.c_t3 == doctest::Approx(5.5).epsilon(1e-9));
  CHECK(result.measured_gap ==
        doctest::Approx(result.analytic_gap).epsilon(1e-9));

  // The sandwich still holds and the upper side is nearly pinned.
  const auto report =
      make_gap_report(result.c_t3, result.c_det, 2);
  CHECK(report.lower_ok);
  CHECK(report.upper_ok);

  // The LP relaxation sees the full n tau p as well.
  const auto lp = timely::solve_lp_relaxation(result.instance);
  CHECK(lp.objective == doctest::Approx(5.5).epsilon(1e-9));

  // Full owner-vector search cannot beat the constructed partition.
  const auto solved = timely::exact_capacity(result.instance);
  CHECK(solved.value == doctest::Approx(result.c_t3).epsilon(1e-9));
}

TEST_CASE("upper-side family approaches the n offset as epsilon vanishes") {
  const auto near = tight_upper_instance(2, 4, 0.05);
  CHECK(near.analytic_gap == doctest::Approx(1.95).epsilon(1e-12));
  CHECK(near.measured_gap ==
        doctest::Approx(near.analytic_gap).epsilon(1e-9));

  const auto far = tight_upper_instance(2, 4, 1.95);
  CHECK(far.analytic_gap == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(far.measured_gap == doctest::Approx(far.analytic_gap).epsilon(1e-9));
}

TEST_CASE("upper-side family input validation") {
  CHECK_THROWS_AS(tight_upper_instance(2, 3, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(tight_upper_instance(2, 4, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(tight_upper_instance(2, 4, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(tight_upper_instance(2, 4, 0.5, 3), std::invalid_argument);
  CHECK_THROWS_AS(tight_upper_instance(0, 4, 0.5), std::invalid_argument);
}

TEST_CASE("lower-side tight family matches its closed-form gap") {
  const auto result = tight_lower_instance(1, 2, 4);
  CHECK(result.success_prob == 0.5);
  CHECK(result.packed_per_ap == 2);
  CHECK(result.c_det == 2.0);
  CHECK(result.c_t3 == doctest::Approx(1.625).epsilon(1e-12));
  CHECK(result.closed_form_gap == doctest::Approx(0.375).epsilon(1e-12));
  CHECK(result.measured_gap ==
        doctest::Approx(result.closed_form_gap).epsilon(1e-10));
  CHECK(result.order_floor ==
        doctest::Approx(std::exp(-1.0 / 6.0) *
                        std::sqrt(0.5 / (2.0 * std::acos(-1.0))) *
                        std::sqrt(2.0))
            .epsilon(1e-12));
  // The family exists to show the gap exceeds its order floor.
  CHECK(result.closed_form_gap > result.order_floor);

  // Two APs double everything.
  const auto doubled = tight_lower_instance(2, 4, 4);
  CHECK(doubled.closed_form_gap == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(doubled.c_t3 == doctest::Approx(3.25).epsilon(1e-12));
  // The constructed partition is the best one.
  const auto solved = timely::exact_capacity(doubled.instance);
  CHECK(solved.value == doctest::Approx(doubled.c_t3).epsilon(1e-12));
}

TEST_CASE("lower-side family input validation") {
  CHECK_THROWS_AS(tight_lower_instance(2, 3, 8), std::invalid_argument);
  CHECK_THROWS_AS(tight_lower_instance(2, 0, 8), std::invalid_argument);
  CHECK_THROWS_AS(tight_lower_instance(2, 4, 2), std::invalid_argument);
}

TEST_CASE("per-AP delivery bounds") {
  const std::vector<double> probs = {0.5, 0.5};
  const auto report = delivery_bounds_check(probs, 4);
  CHECK(report.packed_count == 2);
  CHECK(report.expected == doctest::Approx(1.625).epsilon(1e-12));
  CHECK(report.upper == 3.0);
  CHECK(report.lower == doctest::Approx(2.0 - 2.0 * std::sqrt(2.25))
                            .epsilon(1e-12));
  CHECK(report.lower_ok);
  CHECK(report.upper_ok);
  CHECK(report.margin_lhs == 2.0);  // 1 + min(1, 1/(2-1)^2)
  CHECK(report.margin_rhs == 3.0);  // 2 sqrt(2.25)
  CHECK(report.margin_ok);
}

TEST_CASE("delivery bounds hold across random probability lists") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    testgen::Rand r(seed * 41 + 13);
    const int q = r.range(1, 8);
    const int tau = r.range(1, 14);
    std::vector<double> probs(static_cast<size_t>(q));
    for (double& p : probs) p = 0.05 + 0.95 * r.uniform();
    std::sort(probs.rbegin(), probs.rend());

    const auto report = delivery_bounds_check(probs, tau);
    CHECK(report.lower_ok);
    CHECK(report.upper_ok);
    CHECK(report.margin_ok);
    CHECK(report.expected ==
          doctest::Approx(oracle::expected_deliveries(probs, tau))
              .epsilon(1e-12));
  }
}

TEST_CASE("delivery bounds input validation") {
  const std::vector<double> increasing = {0.3, 0.7};
  CHECK_THROWS_AS(delivery_bounds_check(increasing, 4),
                  std::invalid_argument);
  const std::vector<double> zero = {0.5, 0.0};
  CHECK_THROWS_AS(delivery_bounds_check(zero, 4), std::invalid_argument);
  const std::vector<double> fine = {0.5};
  CHECK_THROWS_AS(delivery_bounds_check(fine, 0), std::invalid_argument);
}

TEST_CASE("equal-probability gap closed form") {
  CHECK(equal_p_gap_closed_form(0.5, 4) ==
        doctest::Approx(0.375).epsilon(1e-12));
  // l = p tau must be an integer >= 1.
  CHECK_THROWS_AS(equal_p_gap_closed_form(0.3, 4), std::invalid_argument);
  CHECK_THROWS_AS(equal_p_gap_closed_form(0.1, 5), std::invalid_argument);
  CHECK_THROWS_AS(equal_p_gap_closed_form(1.0, 4), std::invalid_argument);

  // Cross-check against direct expected-delivery computation: the gap is
  // l - E[Y] when p tau = l.
  for (int tau = 3; tau <= 12; ++tau) {
    for (int l = 1; l < tau; ++l) {
      const double p = static_cast<double>(l) / tau;
      std::vector<double> probs(static_cast<size_t>(l), p);
      const double direct =
          l - oracle::expected_deliveries(probs, tau);
      CHECK(equal_p_gap_closed_form(p, tau) ==
            doctest::Approx(direct).epsilon(1e-10));
    }
  }
}
