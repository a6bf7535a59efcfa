#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "testgen.hpp"
#include "timely/capacity.hpp"
#include "timely/delivery.hpp"
#include "timely/errors.hpp"

using timely::build_instance;
using timely::delivery_distribution;
using timely::exact_capacity;
using timely::expected_deliveries;
using timely::Instance;
using timely::SearchMode;
using timely::SearchOptions;

namespace {

Instance footnote_instance() {
  return build_instance(2, 2, 1, {{0.5, 0.5}, {0.5, 0.5}});
}

}  // namespace

TEST_CASE("delivery law of two half-probability clients over four slots") {
  // Two packets, p = 1/2 each, tau = 4: delivery count is a binomial capped
  // at 2, so the pmf is 1/16, 4/16, 11/16.
  const std::vector<double> probs = {0.5, 0.5};
  const auto dist = delivery_distribution(probs, 4);
  REQUIRE(dist.pmf.size() == 3);
  CHECK(dist.pmf[0] == doctest::Approx(0.0625).epsilon(1e-12));
  CHECK(dist.pmf[1] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(dist.pmf[2] == doctest::Approx(0.6875).epsilon(1e-12));
  CHECK(dist.expected() == doctest::Approx(1.625).epsilon(1e-12));
  CHECK(dist.variance() == doctest::Approx(0.359375).epsilon(1e-12));

  const auto survival = dist.survival();
  REQUIRE(survival.size() == 2);
  CHECK(survival[0] == doctest::Approx(0.9375).epsilon(1e-12));
  CHECK(survival[1] == doctest::Approx(0.6875).epsilon(1e-12));
}

TEST_CASE("delivery distribution edge cases") {
  // Empty list: always zero deliveries.
  const std::vector<double> none;
  const auto empty = delivery_distribution(none, 3);
  REQUIRE(empty.pmf.size() == 1);
  CHECK(empty.pmf[0] == 1.0);
  CHECK(empty.expected() == 0.0);

  // Sure channels deliver one packet per slot until the list runs out.
  const std::vector<double> sure = {1.0, 1.0};
  CHECK(delivery_distribution(sure, 1).expected() == 1.0);
  CHECK(delivery_distribution(sure, 2).expected() == 2.0);
  CHECK(delivery_distribution(sure, 5).expected() == 2.0);

  // A dead head-of-line channel blocks the whole list.
  const std::vector<double> dead = {0.0, 1.0};
  CHECK(delivery_distribution(dead, 4).expected() == 0.0);

  const std::vector<double> half = {0.5};
  const std::vector<double> out_of_range = {1.5};
  CHECK_THROWS_AS(delivery_distribution(half, 0), std::invalid_argument);
  CHECK_THROWS_AS(delivery_distribution(out_of_range, 2),
                  std::invalid_argument);
}

TEST_CASE("delivery DP matches the geometric-convolution oracle") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    testgen::Rand r(seed * 31 + 7);
    const int q = r.range(1, 8);
    const int tau = r.range(1, 12);
    std::vector<double> probs(static_cast<size_t>(q));
    for (double& p : probs) p = r.uniform();

    const double dp = expected_deliveries(probs, tau);
    const double reference = oracle::expected_deliveries(probs, tau);
    CHECK(std::abs(dp - reference) <= 1e-12);

    const auto survival = delivery_distribution(probs, tau).survival();
    for (size_t i = 0; i < survival.size(); ++i)
      CHECK(std::abs(survival[i] - oracle::survival(probs, i + 1, tau)) <=
            1e-12);
  }
}

TEST_CASE("weighted expected deliveries match the oracle") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    testgen::Rand r(seed * 97 + 3);
    const int q = r.range(1, 7);
    const int tau = r.range(1, 10);
    std::vector<double> probs(static_cast<size_t>(q));
    std::vector<double> weights(static_cast<size_t>(q));
    for (double& p : probs) p = r.uniform();
    for (double& w : weights) w = 1.0 + 4.0 * r.uniform();

    const double got = expected_deliveries(probs, tau, weights);
    const double reference = oracle::weighted_expected(probs, weights, tau);
    CHECK(std::abs(got - reference) <= 1e-12);
  }
}

TEST_CASE("footnote instance capacity is exactly one") {
  const auto result = exact_capacity(footnote_instance());
  CHECK(result.value == 1.0);
  // The best split serves one client per AP.
  REQUIRE(result.best_partition.order.size() == 2);
  CHECK(result.best_partition.order[0].size() == 1);
  CHECK(result.best_partition.order[1].size() == 1);
  CHECK(result.per_ap_expected == std::vector<double>{0.5, 0.5});
}

TEST_CASE("exhaustive search matches the permutation oracle") {
  testgen::InstanceShape shape;
  shape.max_aps = 3;
  shape.max_clients = 5;
  shape.max_tau = 8;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto instance = testgen::random_instance(seed + 1000, shape);
    const auto result = exact_capacity(instance);
    const double reference = oracle::best_partition_value(instance);
    CHECK(std::abs(result.value - reference) <= 1e-12);
    // The reported partition really evaluates to the reported value.
    CHECK(timely::evaluate_partition(instance, result.best_partition) ==
          result.value);
  }
}

TEST_CASE("weighted exhaustive search matches the permutation oracle") {
  testgen::InstanceShape shape;
  shape.max_aps = 2;
  shape.max_clients = 5;
  shape.max_tau = 8;
  shape.weighted = true;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto instance = testgen::random_instance(seed + 5000, shape);
    const auto result = exact_capacity(instance);
    const double reference = oracle::best_partition_value(instance);
    CHECK(std::abs(result.value - reference) <= 1e-12);
  }
}

TEST_CASE("greedy service order beats every permutation") {
  // evaluate_partition re-derives the greedy order per AP, so on a single
  // AP owning everything it must match the best over all q! orders.
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    testgen::Rand r(seed * 13 + 11);
    const int q = r.range(1, 6);
    const int tau = r.range(1, 8);
    std::vector<double> probs(static_cast<size_t>(q));
    std::vector<double> weights(static_cast<size_t>(q), 1.0);
    for (double& p : probs) p = r.uniform();
    const bool weighted = seed % 2 == 1;
    if (weighted)
      for (double& w : weights) w = 1.0 + 4.0 * r.uniform();

    const auto instance =
        build_instance(1, q, tau, {probs}, weighted ? weights
                                                    : std::vector<double>{});
    std::vector<int> all(static_cast<size_t>(q));
    for (int j = 0; j < q; ++j) all[static_cast<size_t>(j)] = j;
    const auto partition = timely::partition_from_owner(
        instance, std::vector<int>(static_cast<size_t>(q), 0));
    const double greedy = timely::evaluate_partition(instance, partition);
    const double best_order = oracle::best_list_value(instance, 0, all);
    CHECK(std::abs(greedy - best_order) <= 1e-12);
  }
}

TEST_CASE("branch and bound agrees with exhaustive search bit for bit") {
  testgen::InstanceShape shape;
  shape.max_aps = 3;
  shape.max_clients = 7;
  shape.max_tau = 10;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    shape.weighted = seed % 3 == 0;
    const auto instance = testgen::random_instance(seed + 2000, shape);

    SearchOptions exhaustive;
    exhaustive.mode = SearchMode::kExhaustive;
    SearchOptions bounded;
    bounded.mode = SearchMode::kBranchAndBound;

    const auto a = exact_capacity(instance, exhaustive);
    const auto b = exact_capacity(instance, bounded);
    CHECK(a.value == b.value);
    CHECK(timely::evaluate_partition(instance, b.best_partition) == b.value);
  }
}

TEST_CASE("parallel and serial exhaustive search give identical results") {
  testgen::InstanceShape shape;
  shape.max_aps = 2;
  shape.max_clients = 13;  // 8192 partitions: enough to fan out
  shape.max_tau = 6;
  const auto instance = testgen::random_instance(424242, shape);

  SearchOptions serial;
  serial.threads = 1;
  SearchOptions parallel;
  parallel.threads = 4;

  const auto a = exact_capacity(instance, serial);
  const auto b = exact_capacity(instance, parallel);
  CHECK(a.value == b.value);
  CHECK(a.best_partition.owner == b.best_partition.owner);
  CHECK(a.best_partition.order == b.best_partition.order);
}

TEST_CASE("capacity never drops when a client or a slot is added") {
  testgen::InstanceShape shape;
  shape.max_aps = 2;
  shape.max_clients = 5;
  shape.max_tau = 6;
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    const auto instance = testgen::random_instance(seed + 3000, shape);
    const double base = exact_capacity(instance).value;

    // One more slot per interval.
    auto longer = build_instance(instance.n_aps, instance.n_clients,
                                 instance.tau + 1, instance.success);
    CHECK(exact_capacity(longer).value >= base - 1e-12);

    // One more client with a usable channel everywhere.
    auto success = instance.success;
    for (auto& row : success) row.push_back(0.5);
    auto bigger = build_instance(instance.n_aps, instance.n_clients + 1,
                                 instance.tau, success);
    CHECK(exact_capacity(bigger).value >= base - 1e-12);
  }
}

TEST_CASE("search budget is enforced") {
  // 3^20 partitions is far beyond this budget.
  const auto big = build_instance(3, 20, 4,
                                  std::vector<std::vector<double>>(
                                      3, std::vector<double>(20, 0.5)));
  SearchOptions options;
  options.max_evaluations = 1000;
  CHECK_THROWS_AS(exact_capacity(big, options), timely::BudgetExceeded);
}

TEST_CASE("partition client rates sum to the partition value") {
  testgen::InstanceShape shape;
  shape.max_aps = 3;
  shape.max_clients = 6;
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    const auto instance = testgen::random_instance(seed + 4000, shape);
    const auto result = exact_capacity(instance);
    const auto rates =
        timely::partition_client_rates(instance, result.best_partition);
    REQUIRE(static_cast<int>(rates.size()) == instance.n_clients);
    double total = 0.0;
    double weighted_total = 0.0;
    for (int j = 0; j < instance.n_clients; ++j) {
      total += rates[static_cast<size_t>(j)];
      weighted_total += rates[static_cast<size_t>(j)] *
                        instance.weights[static_cast<size_t>(j)];
    }
    // Unweighted instances: the value is the plain rate sum.
    CHECK(std::abs(weighted_total - result.value) <= 1e-12);
    CHECK(total <= result.value + 1e-12);
  }
}
