#include "timely/rateadapt.hpp"

#include <cmath>
#include <stdexcept>

#include "timely/errors.hpp"

namespace timely {
namespace {

void check(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

void validate_profile(const BandwidthProfile& profile) {
  check(!profile.widths.empty(), "need at least one AP");
  // tau = 0 is a legal degenerate profile: the only allocation is all-zero.
  check(profile.tau >= 0, "interval length must be nonnegative");
  for (int w : profile.widths) check(w >= 1, "bandwidth width below 1");
}

// Row-major strides, last axis fastest.
std::vector<std::size_t> strides_of(const std::vector<int>& dims) {
  std::vector<std::size_t> strides(dims.size(), 1);
  for (size_t i = dims.size() - 1; i-- > 0;)
    strides[i] = strides[i + 1] * static_cast<std::size_t>(dims[i + 1]);
  return strides;
}

}  // namespace

std::vector<int> BandwidthProfile::dims() const {
  std::vector<int> d;
  d.reserve(widths.size());
  for (int w : widths) d.push_back(w * tau + 1);
  return d;
}

std::size_t BandwidthProfile::tuple_count() const {
  std::size_t total = 1;
  for (int d : dims()) total *= static_cast<std::size_t>(d);
  return total;
}

RewardTensor RewardTensor::dense(BandwidthProfile profile,
                                 std::vector<std::vector<double>> rewards) {
  validate_profile(profile);
  check(profile.n_aps() <= 2, "dense tensors support at most two APs");
  check(!rewards.empty(), "need at least one client");

  const std::vector<int> dims = profile.dims();
  const std::vector<std::size_t> strides = strides_of(dims);
  const std::size_t total = profile.tuple_count();
  for (const auto& client_rewards : rewards) {
    check(client_rewards.size() == total,
          "client reward table size != allocation tuple count");
    check(client_rewards[0] == 0.0, "reward at the all-zero tuple must be 0");
    for (double r : client_rewards)
      check(std::isfinite(r) && r >= 0.0, "rewards must be finite and >= 0");
    // Monotone along every axis: compare each entry to its predecessor.
    for (std::size_t flat = 0; flat < total; ++flat) {
      std::size_t rest = flat;
      for (size_t axis = 0; axis < dims.size(); ++axis) {
        const std::size_t coord = rest / strides[axis];
        rest %= strides[axis];
        if (coord == 0) continue;
        check(client_rewards[flat] >= client_rewards[flat - strides[axis]],
              "rewards must be nondecreasing in every coordinate");
      }
    }
  }

  RewardTensor tensor;
  tensor.profile_ = std::move(profile);
  tensor.strides_ = strides;
  tensor.n_clients_ = static_cast<int>(rewards.size());
  tensor.dense_ = std::move(rewards);
  return tensor;
}

RewardTensor RewardTensor::callback(BandwidthProfile profile, int n_clients,
                                    Evaluator evaluator) {
  validate_profile(profile);
  check(profile.n_aps() == 3, "callback tensors are for exactly three APs");
  check(n_clients >= 1, "need at least one client");
  check(static_cast<bool>(evaluator), "missing evaluator");

  RewardTensor tensor;
  tensor.profile_ = std::move(profile);
  tensor.strides_ = strides_of(tensor.profile_.dims());
  tensor.n_clients_ = n_clients;
  tensor.evaluator_ = std::move(evaluator);
  const std::vector<int> zero(tensor.profile_.widths.size(), 0);
  check(tensor.evaluator_(0, zero) == 0.0,
        "reward at the all-zero tuple must be 0");
  return tensor;
}

RewardDpResult solve_reward_dp(const RewardTensor& tensor,
                               const RewardDpOptions& options) {
  const BandwidthProfile& profile = tensor.profile();
  const std::vector<int> dims = profile.dims();
  const std::vector<std::size_t> strides = strides_of(dims);
  const std::size_t total = profile.tuple_count();
  const int m = tensor.n_clients();
  const int n = profile.n_aps();

  const std::uint64_t entries =
      static_cast<std::uint64_t>(m + 1) * static_cast<std::uint64_t>(total);
  if (entries > options.max_table_entries)
    throw BudgetExceeded("reward table needs " + std::to_string(entries) +
                         " entries, budget is " +
                         std::to_string(options.max_table_entries));

  // layer[c][t] = best total reward of the first c clients given residual
  // budget tuple t.  Layer 0 is identically zero.
  std::vector<std::vector<double>> layer(
      static_cast<size_t>(m + 1), std::vector<double>(total, 0.0));

  RewardDpResult result;
  std::vector<int> t_coord(static_cast<size_t>(n), 0);
  std::vector<int> x_coord(static_cast<size_t>(n), 0);

  auto for_each_sub_tuple = [&](const std::vector<int>& limit, auto&& body) {
    // Lexicographic ascent over x <= limit componentwise; the first strict
    // maximum found is therefore the lexicographically smallest one.
    std::fill(x_coord.begin(), x_coord.end(), 0);
    for (;;) {
      body(x_coord);
      int axis = n;
      while (axis-- > 0) {
        if (++x_coord[static_cast<size_t>(axis)] <=
            limit[static_cast<size_t>(axis)])
          break;
        x_coord[static_cast<size_t>(axis)] = 0;
      }
      if (axis < 0) break;
    }
  };

  auto flat_of = [&](const std::vector<int>& coord) {
    std::size_t flat = 0;
    for (size_t i = 0; i < coord.size(); ++i)
      flat += static_cast<std::size_t>(coord[i]) * strides[i];
    return flat;
  };

  for (int c = 1; c <= m; ++c) {
    const auto& prev = layer[static_cast<size_t>(c - 1)];
    auto& cur = layer[static_cast<size_t>(c)];
    for (std::size_t t_flat = 0; t_flat < total; ++t_flat) {
      std::size_t rest = t_flat;
      for (size_t i = 0; i < static_cast<size_t>(n); ++i) {
        t_coord[i] = static_cast<int>(rest / strides[i]);
        rest %= strides[i];
      }
      double best = -1.0;
      for_each_sub_tuple(t_coord, [&](const std::vector<int>& x) {
        ++result.op_count;
        const std::size_t x_flat = flat_of(x);
        const double candidate =
            prev[t_flat - x_flat] +
            (tensor.is_dense() ? tensor.reward_flat(c - 1, x_flat)
                               : tensor.reward(c - 1, x));
        if (candidate > best) best = candidate;
      });
      cur[t_flat] = best;
    }
  }
  result.value = layer[static_cast<size_t>(m)][total - 1];

  // Backtrack: clients last to first, taking the lexicographically smallest
  // tuple reproducing each layer value.  Values compare exactly because the
  // forward pass computed them from these very sums.
  result.allocation.assign(static_cast<size_t>(m),
                           std::vector<int>(static_cast<size_t>(n), 0));
  std::vector<int> residual(static_cast<size_t>(n), 0);
  for (int i = 0; i < n; ++i)
    residual[static_cast<size_t>(i)] = dims[static_cast<size_t>(i)] - 1;
  for (int c = m; c >= 1; --c) {
    const std::size_t t_flat = flat_of(residual);
    const double want = layer[static_cast<size_t>(c)][t_flat];
    const auto& prev = layer[static_cast<size_t>(c - 1)];
    bool found = false;
    std::vector<int> chosen(static_cast<size_t>(n), 0);
    for_each_sub_tuple(residual, [&](const std::vector<int>& x) {
      if (found) return;
      const std::size_t x_flat = flat_of(x);
      const double candidate =
          prev[t_flat - x_flat] +
          (tensor.is_dense() ? tensor.reward_flat(c - 1, x_flat)
                             : tensor.reward(c - 1, x));
      if (candidate == want) {
        chosen = x;
        found = true;
      }
    });
    result.allocation[static_cast<size_t>(c - 1)] = chosen;
    for (int i = 0; i < n; ++i)
      residual[static_cast<size_t>(i)] -= chosen[static_cast<size_t>(i)];
  }
  return result;
}

double brute_force_reward(const RewardTensor& tensor,
                          const BruteForceOptions& options) {
  const BandwidthProfile& profile = tensor.profile();
  const int n = profile.n_aps();
  const int m = tensor.n_clients();
  std::vector<int> residual(static_cast<size_t>(n), 0);
  for (size_t i = 0; i < residual.size(); ++i)
    residual[i] = profile.widths[i] * profile.tau;

  std::uint64_t nodes = 0;
  double best = 0.0;

  auto descend = [&](auto&& self, int client, double value) -> void {
    if (client == m) {
      if (value > best) best = value;
      return;
    }
    // Enumerate this client's allocation tuple within the residual budget.
    // The tuple lives at this depth: deeper calls run their own odometers
    // and must not disturb ours.
    std::vector<int> alloc(static_cast<size_t>(n), 0);
    for (;;) {
      if (++nodes > options.max_nodes)
        throw BudgetExceeded("allocation enumeration passed " +
                             std::to_string(options.max_nodes) + " nodes");
      for (int i = 0; i < n; ++i) residual[static_cast<size_t>(i)] -= alloc[static_cast<size_t>(i)];
      self(self, client + 1, value + tensor.reward(client, alloc));
      for (int i = 0; i < n; ++i) residual[static_cast<size_t>(i)] += alloc[static_cast<size_t>(i)];

      int axis = n;
      while (axis-- > 0) {
        if (++alloc[static_cast<size_t>(axis)] <=
            residual[static_cast<size_t>(axis)])
          break;
        alloc[static_cast<size_t>(axis)] = 0;
      }
      if (axis < 0) break;
    }
  };
  descend(descend, 0, 0.0);
  return best;
}

RewardTensor reward_tensor_from_json(const nlohmann::json& j) {
  BandwidthProfile profile;
  j.at("widths").get_to(profile.widths);
  j.at("tau").get_to(profile.tau);
  auto rewards = j.at("rewards").get<std::vector<std::vector<double>>>();
  return RewardTensor::dense(std::move(profile), std::move(rewards));
}

nlohmann::json reward_tensor_to_json(const RewardTensor& tensor) {
  if (!tensor.is_dense())
    throw std::invalid_argument("only dense tensors serialize to JSON");
  const std::size_t total = tensor.profile().tuple_count();
  std::vector<std::vector<double>> rewards;
  rewards.reserve(static_cast<size_t>(tensor.n_clients()));
  for (int c = 0; c < tensor.n_clients(); ++c) {
    std::vector<double> row(total);
    for (std::size_t flat = 0; flat < total; ++flat)
      row[flat] = tensor.reward_flat(c, flat);
    rewards.push_back(std::move(row));
  }
  return nlohmann::json{{"widths", tensor.profile().widths},
                        {"tau", tensor.profile().tau},
                        {"rewards", rewards}};
}

}  // namespace timely
