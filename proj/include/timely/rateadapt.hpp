#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <json.hpp>

namespace timely {

// Per-AP slot budgets when APs run at different bandwidths: AP i owns
// widths[i] * tau allocatable slots per interval.
struct BandwidthProfile {
  std::vector<int> widths;
  int tau = 0;

  int n_aps() const { return static_cast<int>(widths.size()); }
  // Allocation axis sizes: widths[i] * tau + 1 values per AP.
  std::vector<int> dims() const;
  std::size_t tuple_count() const;
};

// Per-client reward as a function of the slot-allocation tuple it receives
// from each AP.  Rewards must be nondecreasing in every coordinate and zero
// at the all-zero tuple; handing a client more slots never hurts.
//
// Storage is dense (row major, last AP axis fastest) for up to two APs; a
// three-AP tensor is supplied as a callback to keep memory in check.
// Callback rewards are trusted to be monotone; dense ones are checked.
class RewardTensor {
 public:
  using Evaluator =
      std::function<double(int client, const std::vector<int>& alloc)>;

  // Validates shape, zero ground value, and monotonicity along every axis.
  static RewardTensor dense(BandwidthProfile profile,
                            std::vector<std::vector<double>> rewards);

  // n_aps == 3 only.  The evaluator must be pure.
  static RewardTensor callback(BandwidthProfile profile, int n_clients,
                               Evaluator evaluator);

  const BandwidthProfile& profile() const { return profile_; }
  int n_clients() const { return n_clients_; }
  bool is_dense() const { return !dense_.empty(); }

  // Row-major flat index of an allocation tuple (last AP axis fastest).
  std::size_t flat_index(const std::vector<int>& alloc) const {
    std::size_t flat = 0;
    for (size_t i = 0; i < alloc.size(); ++i)
      flat += static_cast<std::size_t>(alloc[i]) * strides_[i];
    return flat;
  }

  double reward(int client, const std::vector<int>& alloc) const {
    if (is_dense()) return reward_flat(client, flat_index(alloc));
    return evaluator_(client, alloc);
  }
  // Dense fast path: flat index precomputed by the caller.
  double reward_flat(int client, std::size_t flat) const {
    return dense_[static_cast<size_t>(client)][flat];
  }

 private:
  RewardTensor() = default;
  BandwidthProfile profile_;
  std::vector<std::size_t> strides_;
  int n_clients_ = 0;
  std::vector<std::vector<double>> dense_;
  Evaluator evaluator_;
};

struct RewardDpOptions {
  // Gate on (n_clients + 1) * tuple_count table entries.
  std::uint64_t max_table_entries = 10'000'000;
};

struct RewardDpResult {
  double value = 0.0;
  std::vector<std::vector<int>> allocation;  // [client][ap]
  // Inner maximization candidates examined; bounded by
  // n_clients * prod_i (widths[i] * tau + 1)^2.
  std::uint64_t op_count = 0;
};

// Exact maximum total reward over all allocations with per-AP totals within
// widths[i] * tau.  Layered dynamic program over residual-budget tuples;
// the allocation is recovered by backtracking with ties broken toward the
// lexicographically smallest tuple per client (scanning clients last to
// first), so results are deterministic.  The value is integer-exact when
// all rewards are integers (sums stay exact in doubles).
RewardDpResult solve_reward_dp(const RewardTensor& tensor,
                               const RewardDpOptions& options = {});

struct BruteForceOptions {
  std::uint64_t max_nodes = 10'000'000;
};

// Reference optimum by exhaustive enumeration of feasible allocations.
// Makes no monotonicity assumption.  Throws BudgetExceeded past max_nodes.
double brute_force_reward(const RewardTensor& tensor,
                          const BruteForceOptions& options = {});

// Dense tensors only: { "widths": [int], "tau": int, "rewards": [[float]] }
// with each client's rewards flattened row major (last AP axis fastest).
RewardTensor reward_tensor_from_json(const nlohmann::json& j);
nlohmann::json reward_tensor_to_json(const RewardTensor& tensor);

}  // namespace timely
