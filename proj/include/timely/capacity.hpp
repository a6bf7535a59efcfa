#pragma once

#include <cstdint>
#include <vector>

#include "timely/instance.hpp"

namespace timely {

enum class SearchMode { kExhaustive, kBranchAndBound };

struct SearchOptions {
  SearchMode mode = SearchMode::kExhaustive;
  // Exhaustive mode refuses to start when n_aps^n_clients exceeds this.
  std::uint64_t max_evaluations = std::uint64_t{1} << 24;
  // 0 = pick from hardware concurrency.  Only exhaustive mode fans out;
  // results are identical for any thread count.
  int threads = 0;
};

struct CapacityResult {
  double value = 0.0;
  Partition best_partition;
  std::vector<double> per_ap_expected;
};

// Expected deliveries (weight-scaled when the instance is weighted) for one
// AP's service list, in the exact order given.
double ap_expected_value(const Instance& instance, int ap,
                         const std::vector<int>& list);

// Sum over APs of expected deliveries under the partition, with every AP
// serving its clients in greedy order (descending weight * success).  The
// stored order lists are ignored; unserved clients contribute 0.
double evaluate_partition(const Instance& instance, const Partition& partition);

// Per-client delivery probabilities under the partition with greedy
// per-AP service order.  Entry j is Pr(client j's packet arrives in time).
std::vector<double> partition_client_rates(const Instance& instance,
                                           const Partition& partition);

// Maximum total (weighted) expected timely deliveries over all static
// assignments of clients to APs.  Leaving a client unserved never helps, so
// the search runs over the n_aps^n_clients owner vectors.
//
// Exhaustive mode enumerates every owner vector (parallel over disjoint
// ranges, merged by value with ties to the smallest vector).  Branch and
// bound assigns clients one at a time, pruning with the admissible bound
// value + sum over unassigned j of max_i [gain of adding j to AP i's
// current list]; insertion gains never grow as lists fill up, so the bound
// stays above every completion.  Both modes return identical values.
//
// Throws BudgetExceeded when exhaustive enumeration would exceed
// options.max_evaluations.
CapacityResult exact_capacity(const Instance& instance,
                              const SearchOptions& options = {});

}  // namespace timely
