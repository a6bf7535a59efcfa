#pragma once

#include <cstdint>
#include <vector>

#include "timely/instance.hpp"

namespace timely {

// Per-slot decision when packets are not pre-partitioned: targets[i] is the
// client AP i transmits to this slot, or kIdle.  Several APs may target the
// same client; the packet counts once if any of them succeeds.
inline constexpr int kIdle = -1;

struct SlotAction {
  std::vector<int> targets;
};

// Expected packets delivered by one slot of the action: for each targeted
// client, 1 minus the product of its targeting APs' failure probabilities.
double slot_expected_deliveries(const SlotAction& action,
                                const Instance& instance);

// Same quantity split per client (used to read off throughput vectors of
// one-slot policies).
std::vector<double> slot_client_rates(const SlotAction& action,
                                      const Instance& instance);

struct SlotChoiceStats {
  std::uint64_t tuples_evaluated = 0;
};

// One step of the per-slot heuristic.  pending is a bitmask over clients.
// Each AP contributes its top min(n_aps, pending count) pending clients by
// success probability (ties to the lower client index); the choice is the
// candidate tuple maximizing slot_expected_deliveries, ties broken toward
// the lexicographically smallest tuple.  Restricting candidates this way
// never loses value: some optimal tuple always survives the cut.
// Empty pending set -> all idle.
SlotAction greedy_slot_choice(const Instance& instance, std::uint32_t pending,
                              SlotChoiceStats* stats = nullptr);

struct OnlineOptions {
  // Cap on tau * 2^n_clients value-table sweeps.
  std::uint64_t max_state_slots = std::uint64_t{1} << 24;
  int threads = 0;  // 0 = hardware concurrency, exhaustive sweeps only
};

// Optimal expected in-deadline deliveries per interval when every packet is
// available to every AP and targets are re-chosen each slot.  Backward
// value recursion over (pending set, slots left).  Two APs use the closed
// pairwise form; other AP counts enumerate the 2^n_aps joint outcomes and
// require n_clients <= 8.  Upper-bounds every static partition's value.
double mdp_optimal_value(const Instance& instance,
                         const OnlineOptions& options = {});

struct GreedyEval {
  enum class Mode { kExact, kSimulated } mode = Mode::kExact;
  std::int64_t intervals = 0;  // simulated mode only
  std::uint64_t seed = 0;      // simulated mode only

  static GreedyEval exact() { return {}; }
  static GreedyEval simulated(std::int64_t intervals, std::uint64_t seed) {
    return {Mode::kSimulated, intervals, seed};
  }
};

struct GreedyPolicyResult {
  double value = 0.0;
  // Candidate tuples examined, totalled over every slot decision the
  // evaluation made; per interval the policy stays within
  // tau * n_aps^n_aps of them.
  std::uint64_t tuples_evaluated = 0;
};

// Value of the per-slot heuristic policy.  Exact mode runs a forward
// distribution sweep over pending sets (same n_clients <= budget gate as
// the optimum); simulated mode plays the policy against seeded channel
// draws with the simulate module's key discipline.
GreedyPolicyResult greedy_policy_value(const Instance& instance,
                                       const GreedyEval& eval,
                                       const OnlineOptions& options = {});

}  // namespace timely
