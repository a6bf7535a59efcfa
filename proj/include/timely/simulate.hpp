#pragma once

#include <cstdint>
#include <vector>

#include "timely/capacity.hpp"
#include "timely/instance.hpp"

namespace timely {

// Outcome of a finite-horizon simulation.  All counts are exact integers,
// so two runs with the same seed agree byte for byte regardless of thread
// count.
struct Metrics {
  std::int64_t intervals = 0;
  std::uint64_t seed = 0;
  std::vector<std::int64_t> per_client_delivered;
  double t3_estimate = 0.0;        // delivered packets per interval
  double weighted_estimate = 0.0;  // delivered weight per interval

  // "client_id,delivered,intervals" rows, client ids 1-based.
  std::string to_csv() const;
};

void to_json(nlohmann::json& j, const Metrics& metrics);

// Simulates the static policy: every interval, each AP walks its service
// list from partition.order, retransmitting until success or interval end.
// Channel draws are keyed by (seed, interval, slot, AP), one substream per
// interval, so intervals fan out across threads with serial-identical
// results.  threads = 0 picks hardware concurrency.
Metrics simulate_static(const Instance& instance, const Partition& partition,
                        std::int64_t intervals, std::uint64_t seed,
                        int threads = 0);

// Per-interval variance of the total delivered count under the partition
// (APs are independent, so the per-AP variances add).  Lets tests place
// exact confidence bands around t3_estimate.
double interval_variance(const Instance& instance, const Partition& partition);

// Finite-state Markov-modulated instance: the channel state fixes both the
// per-client demand (packets requested per interval) and the success
// matrix.  The chain steps once per interval.
struct FsmcState {
  std::vector<int> demand;                   // per real client, >= 0
  std::vector<std::vector<double>> success;  // [n_aps][n_clients]
};

struct FsmcSpec {
  int n_aps = 0;
  int n_clients = 0;
  std::vector<FsmcState> states;
  std::vector<std::vector<double>> transition;  // row-stochastic
  int initial = 0;
};

// Throws std::invalid_argument unless rows are stochastic within 1e-12,
// demands are nonnegative, matrices are shaped, and the chain is
// irreducible (every state reaches every other through positive-probability
// edges).
void validate_fsmc(const FsmcSpec& fsmc);

void to_json(nlohmann::json& j, const FsmcSpec& fsmc);
void from_json(const nlohmann::json& j, FsmcSpec& fsmc);

// Stationary distribution of the validated chain, by direct linear solve.
// Throws NumericalFailure if the solve cannot be certified.
std::vector<double> stationary_distribution(const FsmcSpec& fsmc);

// Simulates the chain with one static partition per state, applied to that
// state's virtually expanded instance (one copy of client j per requested
// packet).  Deliveries are credited to the originating real client.  Chain
// steps use a draw domain separate from channel draws, so a single-state
// chain reproduces simulate_static exactly.
Metrics simulate_fsmc(const FsmcSpec& fsmc,
                      const std::vector<Partition>& partition_per_state,
                      int tau, std::int64_t intervals, std::uint64_t seed);

// Long-run capacity of the modulated system: the stationary average of the
// per-state exact capacities of the expanded instances.
double fsmc_capacity(const FsmcSpec& fsmc, int tau,
                     const SearchOptions& options = {});

}  // namespace timely
